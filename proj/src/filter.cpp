#include "kaf/filter.hpp"

#include "kaf/simd.hpp"

#include <algorithm>
#include <stdexcept>

namespace kaf {

FilterState::FilterState(std::size_t dim, KernelParams p, double step, double threshold)
    : dictionary(dim), params(p), eta(step), mu0(threshold) {
    if (!(step >= 0.0)) throw std::invalid_argument("step size must be non-negative");
    if (!(threshold >= 0.0 && threshold < 1.0)) throw std::invalid_argument("coherence threshold must be in [0,1)");
}

bool coherence_admit(std::span<const double> kvec, double mu0) {
    return std::all_of(kvec.begin(), kvec.end(), [mu0](double k) { return k <= mu0; });
}

namespace {

void check_dim(const FilterState& s, InputView u) {
    if (u.size() != s.dictionary.dim()) throw std::invalid_argument("filter step: input dimension mismatch");
}

double evaluate(FilterState& s, InputView u) {
    s.kvec.resize(s.size());
    s.dictionary.kernel_vector(u, s.params, s.kvec);
    return simd::active_kernels().dot(s.alpha.data(), s.kvec.data(), s.size());
}

}  // namespace

StepOutcome klms_step(FilterState& s, InputView u, double d) {
    check_dim(s, u);
    StepOutcome out;
    out.prediction = evaluate(s, u);
    out.error = d - out.prediction;
    out.admitted = coherence_admit(s.kvec, s.mu0);
    if (out.admitted) {
        s.dictionary.append(u);
        s.alpha.push_back(0.0);
        s.kvec.push_back(1.0);  // kappa(u, u)
    }
    simd::active_kernels().axpy(s.eta * out.error, s.kvec.data(), s.alpha.data(), s.size());
    return out;
}

StepOutcome lms_step_fixed(FilterState& s, InputView u, double d) {
    check_dim(s, u);
    StepOutcome out;
    out.prediction = evaluate(s, u);
    out.error = d - out.prediction;
    simd::active_kernels().axpy(s.eta * out.error, s.kvec.data(), s.alpha.data(), s.size());
    return out;
}

double predict(const FilterState& s, InputView u) {
    if (u.size() != s.dictionary.dim()) throw std::invalid_argument("predict: input dimension mismatch");
    if (s.alpha.empty()) return 0.0;
    const auto k = s.dictionary.kernel_vector(u, s.params);
    return simd::active_kernels().dot(s.alpha.data(), k.data(), k.size());
}

double dictionary_coherence(const Dictionary& dict, const KernelParams& p) {
    double mu = 0.0;
    const auto centers = dict.centers();
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j) mu = std::max(mu, gaussian_kernel(centers[i], centers[j], p));
    return mu;
}

}  // namespace kaf
