#pragma once
#include <cstddef>
#include <cstdint>
#include "adapt/kernels/philox.hpp"

namespace adapt::simd {

// Data-parallel inner loops, runtime-selected. The scalar entries are the
// reference semantics; vector variants must match them exactly for the
// integer kernels (uniform_fill, bernoulli_count, dot) and to <=4 ulp for
// the transcendental ones. tests/unit_kernels.cpp enforces this.
struct Kernels {
    const char* name;
    // uniforms u_i, draw indices [i0, i0+n) of the stream
    void (*uniform_fill)(const StreamKey&, std::uint64_t i0, std::size_t n, double* out);
    // #{ i in [i0, i0+n) : u_i < p }
    std::uint64_t (*bernoulli_count)(const StreamKey&, std::uint64_t i0, std::uint64_t n, double p);
    // standard normal cdf / pdf over arrays
    void (*norm_cdf)(const double* x, double* out, std::size_t n);
    void (*norm_pdf)(const double* x, double* out, std::size_t n);
    // sum a[i]*b[i] with the fixed 4-accumulator reduction order
    double (*dot)(const double* a, const double* b, std::size_t n);
};

const Kernels& scalar_kernels();
#if defined(ADAPTRIAL_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif

// Active implementation: best supported at startup, overridable with
// ADAPTRIAL_KERNELS=scalar|avx2.
const Kernels& active();

}  // namespace adapt::simd
