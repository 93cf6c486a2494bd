#include "kaf/simd.hpp"

#include <cmath>

namespace kaf::simd {
namespace {

void accumulate_sq_diff(const double* col, double x, double* out, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) {
        const double t = col[m] - x;
        out[m] += t * t;
    }
}

void exp_neg_scaled(double* v, double scale, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) v[m] = std::exp(-v[m] * scale);
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += a[m] * b[m];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) y[m] += a * x[m];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", accumulate_sq_diff, exp_neg_scaled, dot, axpy};
    return table;
}

}  // namespace kaf::simd
