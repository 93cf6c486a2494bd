#include "kaf/kernel.hpp"

#include "kaf/simd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kaf {

KernelParams::KernelParams(double bandwidth) : xi(bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("kernel bandwidth must be positive and finite");
    }
}

double gaussian_kernel(InputView a, InputView b, const KernelParams& p) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("gaussian_kernel: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        d2 += t * t;
    }
    return std::exp(-d2 * p.inv_two_xi_sq());
}

Dictionary::Dictionary(std::size_t dim) : cols_(dim) {
    if (dim == 0) throw std::invalid_argument("dictionary dimension must be >= 1");
}

Dictionary::Dictionary(std::size_t dim, std::span<const InputVector> centers) : Dictionary(dim) {
    for (const auto& c : centers) append(c);
}

void Dictionary::append(InputView u) {
    if (u.size() != dim()) throw std::invalid_argument("dictionary append: dimension mismatch");
    for (std::size_t d = 0; d < dim(); ++d) cols_[d].push_back(u[d]);
}

void Dictionary::erase(std::size_t index) {
    if (index >= size()) throw std::out_of_range("dictionary erase: index out of range");
    for (auto& col : cols_) col.erase(col.begin() + static_cast<std::ptrdiff_t>(index));
}

void Dictionary::clear() {
    for (auto& col : cols_) col.clear();
}

InputVector Dictionary::center(std::size_t index) const {
    InputVector c(dim());
    for (std::size_t d = 0; d < dim(); ++d) c[d] = cols_[d].at(index);
    return c;
}

std::vector<InputVector> Dictionary::centers() const {
    std::vector<InputVector> out;
    out.reserve(size());
    for (std::size_t m = 0; m < size(); ++m) out.push_back(center(m));
    return out;
}

void Dictionary::kernel_vector(InputView u, const KernelParams& p, std::span<double> out) const {
    if (u.size() != dim()) throw std::invalid_argument("kernel_vector: dimension mismatch");
    if (out.size() != size()) throw std::invalid_argument("kernel_vector: output size mismatch");
    const auto& k = simd::active_kernels();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t d = 0; d < dim(); ++d) k.accumulate_sq_diff(cols_[d].data(), u[d], out.data(), out.size());
    k.exp_neg_scaled(out.data(), p.inv_two_xi_sq(), out.size());
}

std::vector<double> Dictionary::kernel_vector(InputView u, const KernelParams& p) const {
    std::vector<double> out(size());
    kernel_vector(u, p, out);
    return out;
}

std::vector<double> kernel_vector(InputView u, std::span<const InputVector> centers, const KernelParams& p) {
    std::vector<double> out;
    out.reserve(centers.size());
    for (const auto& c : centers) out.push_back(gaussian_kernel(u, c, p));
    return out;
}

}  // namespace kaf
