#include "kaf/simd.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace kaf::simd {

#if defined(KAF_HAVE_AVX2_TU)
namespace detail {
const KernelTable& avx2_table();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(KAF_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable& resolve() {
    const char* env = std::getenv("KAF_SIMD");
    const std::string choice = env ? env : "auto";
    if (choice == "scalar") return scalar_kernels();
    if (choice == "avx2") {
        if (const auto* t = avx2_kernels()) return *t;
        throw std::runtime_error("KAF_SIMD=avx2 requested but AVX2/FMA is unavailable");
    }
    if (choice != "auto") throw std::runtime_error("KAF_SIMD must be auto, scalar or avx2");
    if (const auto* t = avx2_kernels()) return *t;
    return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
    static const KernelTable& table = resolve();
    return table;
}

}  // namespace kaf::simd
