#pragma once
// Data-parallel inner loops of the kernel filter.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is picked once at first use from the
// CPU features, and can be pinned with KAF_SIMD=scalar|avx2.

#include <cstddef>
#include <string_view>

namespace kaf::simd {

struct KernelTable {
    std::string_view name;

    // out[m] += (col[m] - x)^2 for m < n. Called once per input dimension
    // on dimension-major center storage.
    void (*accumulate_sq_diff)(const double* col, double x, double* out, std::size_t n);

    // v[m] = exp(-v[m] * scale). The vector variant flushes results below
    // ~1e-308 to zero instead of producing subnormals.
    void (*exp_neg_scaled)(double* v, double scale, std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);

    // y[m] += a * x[m]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the binary lacks the AVX2 path or the CPU does not support it.
const KernelTable* avx2_kernels();

// Table used by the library; resolved once, thread-safe.
const KernelTable& active_kernels();

}  // namespace kaf::simd
