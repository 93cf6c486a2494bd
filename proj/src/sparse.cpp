#include "kaf/sparse.hpp"

#include "kaf/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kaf {

RegularizerKind parse_regularizer_kind(std::string_view s) {
    if (s == "none") return RegularizerKind::none;
    if (s == "l1") return RegularizerKind::l1;
    if (s == "adaptive_l1") return RegularizerKind::adaptive_l1;
    throw std::invalid_argument("unknown regularizer kind '" + std::string(s) + "'");
}

std::string_view to_string(RegularizerKind k) {
    switch (k) {
        case RegularizerKind::none: return "none";
        case RegularizerKind::l1: return "l1";
        case RegularizerKind::adaptive_l1: return "adaptive_l1";
    }
    return "none";
}

void RegularizerSpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
    if (kind == RegularizerKind::adaptive_l1 && !(epsilon_alpha > 0.0))
        throw std::invalid_argument("epsilon_alpha must be > 0");
}

namespace {

inline double soft(double a, double t) {
    const double r = std::abs(a) - t;
    return r > 0.0 ? std::copysign(r, a) : 0.0;
}

}  // namespace

std::vector<double> prox_l1(std::span<const double> alpha, double threshold) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("prox_l1: threshold must be >= 0");
    std::vector<double> out(alpha.size());
    for (std::size_t m = 0; m < alpha.size(); ++m) out[m] = soft(alpha[m], threshold);
    return out;
}

std::vector<double> prox_adaptive_l1(std::span<const double> alpha, double base_threshold,
                                     std::span<const double> alpha_prev, double eps) {
    if (!(base_threshold >= 0.0)) throw std::invalid_argument("prox_adaptive_l1: threshold must be >= 0");
    if (!(eps > 0.0)) throw std::invalid_argument("prox_adaptive_l1: eps must be > 0");
    if (alpha_prev.size() > alpha.size()) throw std::invalid_argument("prox_adaptive_l1: alpha_prev longer than alpha");
    std::vector<double> out(alpha.size());
    for (std::size_t m = 0; m < alpha.size(); ++m) {
        const double prev = m < alpha_prev.size() ? std::abs(alpha_prev[m]) : 0.0;
        out[m] = soft(alpha[m], base_threshold / (prev + eps));
    }
    return out;
}

StepOutcome fobos_klms_step(FilterState& s, InputView u, double d, const RegularizerSpec& reg, FobosTrace* trace) {
    if (reg.kind == RegularizerKind::none) {
        if (trace) {
            trace->correction.assign(s.size(), 0.0);
            trace->pruned = 0;
        }
        return klms_step(s, u, d);
    }

    std::vector<double> prev;
    if (reg.kind == RegularizerKind::adaptive_l1) prev = s.alpha;

    const StepOutcome out = klms_step(s, u, d);
    const double t = reg.lambda * s.eta;
    std::vector<double> next = reg.kind == RegularizerKind::l1 ? prox_l1(s.alpha, t)
                                                                : prox_adaptive_l1(s.alpha, t, prev, reg.epsilon_alpha);
    if (trace) {
        trace->correction.resize(next.size());
        for (std::size_t m = 0; m < next.size(); ++m) trace->correction[m] = s.alpha[m] - next[m];
        trace->pruned = 0;
    }

    // Remove from the back so indices of unvisited centers stay valid.
    for (std::size_t m = next.size(); m-- > 0;) {
        if (next[m] == 0.0) {
            s.dictionary.erase(m);
            next.erase(next.begin() + static_cast<std::ptrdiff_t>(m));
            if (m < s.kvec.size()) s.kvec.erase(s.kvec.begin() + static_cast<std::ptrdiff_t>(m));
            if (trace) ++trace->pruned;
        }
    }
    s.alpha = std::move(next);
    return out;
}

StabilityBound stability_bound(const Eigen::MatrixXd& R) {
    if (R.rows() != R.cols() || R.rows() == 0) throw std::invalid_argument("stability_bound: Rkk must be square and non-empty");
    const double scale = R.cwiseAbs().maxCoeff();
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
        throw std::invalid_argument("stability_bound: Rkk is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("stability_bound: eigendecomposition failed");
    StabilityBound b;
    b.lambda_max = es.eigenvalues().maxCoeff();
    if (!(b.lambda_max > 0.0)) throw NumericalError("stability_bound: Rkk is not positive definite");
    b.eta_max = 2.0 / b.lambda_max;

    const Eigen::Index M = R.rows();
    const double md = R(0, 0);
    const double od = M > 1 ? R(1, 0) : 0.0;
    bool two_value = true;
    for (Eigen::Index i = 0; i < M && two_value; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            if (R(i, j) != (i == j ? md : od)) {
                two_value = false;
                break;
            }
    if (two_value) b.closed_form_lambda_max = md + static_cast<double>(M - 1) * od;
    return b;
}

}  // namespace kaf
