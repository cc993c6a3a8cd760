#include "adapt/kernels/kernels.hpp"
#include "adapt/kernels/kernel_math.hpp"

namespace adapt::simd {
namespace {

void uniform_fill_scalar(const StreamKey& k, std::uint64_t i0, std::size_t n, double* out) {
    for (std::size_t j = 0; j < n; ++j)
        out[j] = bits_to_unit(raw_bits(k, i0 + j));
}

std::uint64_t bernoulli_count_scalar(const StreamKey& k, std::uint64_t i0, std::uint64_t n, double p) {
    const std::uint64_t thr = bernoulli_threshold(p);
    std::uint64_t cnt = 0;
    for (std::uint64_t j = 0; j < n; ++j)
        cnt += (raw_bits(k, i0 + j) >> 12) < thr;
    return cnt;
}

void norm_cdf_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::norm_cdf_one(x[i]);
}

void norm_pdf_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::phi_pdf(x[i]);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; ++l)
            acc[l] = std::fma(a[i + l], b[i + l], acc[l]);
    for (int l = 0; i < n; ++i, ++l)
        acc[l] = std::fma(a[i], b[i], acc[l]);
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", uniform_fill_scalar, bernoulli_count_scalar,
                           norm_cdf_scalar, norm_pdf_scalar, dot_scalar};
    return k;
}

}  // namespace adapt::simd
