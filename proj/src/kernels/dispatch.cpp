#include "adapt/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace adapt::simd {

namespace {

const Kernels& pick() {
    const char* env = std::getenv("ADAPTRIAL_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
#if defined(ADAPTRIAL_HAVE_AVX2)
    if (env && std::strcmp(env, "avx2") == 0) return avx2_kernels();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_kernels();
#endif
    return scalar_kernels();
}

}  // namespace

const Kernels& active() {
    static const Kernels& k = pick();
    return k;
}

}  // namespace adapt::simd
