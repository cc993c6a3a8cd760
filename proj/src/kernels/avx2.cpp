#include "adapt/kernels/kernels.hpp"
#include "adapt/kernels/kernel_math.hpp"

#include <immintrin.h>
#include <cstring>

namespace adapt::simd {
namespace {

using detail::kExpOrder;
using detail::kInvSqrt2Pi;
using detail::kMillsDepth;
using detail::kSeriesCut;
using detail::kSeriesTerms;

const __m256i kLo32 = _mm256_set1_epi64x(0xffffffffll);

// Four Philox blocks at once; 32-bit words live in the low half of 64-bit lanes.
struct Blocks4 {
    __m256i x0, x1, x2, x3;
};

inline Blocks4 philox4(__m256i ctr0, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3,
                       std::uint32_t k0, std::uint32_t k1) {
    const __m256i M0 = _mm256_set1_epi64x(0xD2511F53ll);
    const __m256i M1 = _mm256_set1_epi64x(0xCD9E8D57ll);
    const __m256i W0 = _mm256_set1_epi64x(0x9E3779B9ll);
    const __m256i W1 = _mm256_set1_epi64x(0xBB67AE85ll);
    __m256i x0 = ctr0;
    __m256i x1 = _mm256_set1_epi64x(c1);
    __m256i x2 = _mm256_set1_epi64x(c2);
    __m256i x3 = _mm256_set1_epi64x(c3);
    __m256i vk0 = _mm256_set1_epi64x(k0);
    __m256i vk1 = _mm256_set1_epi64x(k1);
    for (int r = 0; r < 10; ++r) {
        __m256i p0 = _mm256_mul_epu32(x0, M0);
        __m256i p1 = _mm256_mul_epu32(x2, M1);
        __m256i hi0 = _mm256_srli_epi64(p0, 32);
        __m256i lo0 = _mm256_and_si256(p0, kLo32);
        __m256i hi1 = _mm256_srli_epi64(p1, 32);
        __m256i lo1 = _mm256_and_si256(p1, kLo32);
        __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), vk0);
        x1 = lo1;
        __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), vk1);
        x3 = lo0;
        x0 = n0;
        x2 = n2;
        vk0 = _mm256_and_si256(_mm256_add_epi64(vk0, W0), kLo32);
        vk1 = _mm256_and_si256(_mm256_add_epi64(vk1, W1), kLo32);
    }
    return {x0, x1, x2, x3};
}

// 64-bit draw words of four consecutive blocks: even draws (2B) and odd (2B+1).
inline void draw_words(const StreamKey& k, std::uint64_t block0, __m256i& even, __m256i& odd) {
    __m256i ctr0 = _mm256_set_epi64x(static_cast<long long>((block0 + 3) & 0xffffffffull),
                                     static_cast<long long>((block0 + 2) & 0xffffffffull),
                                     static_cast<long long>((block0 + 1) & 0xffffffffull),
                                     static_cast<long long>(block0 & 0xffffffffull));
    Blocks4 b = philox4(ctr0, k.rep, k.theta, k.domain,
                        static_cast<std::uint32_t>(k.seed),
                        static_cast<std::uint32_t>(k.seed >> 32));
    even = _mm256_or_si256(b.x0, _mm256_slli_epi64(b.x1, 32));
    odd = _mm256_or_si256(b.x2, _mm256_slli_epi64(b.x3, 32));
}

// (x >> 12) + 0.5 scaled by 2^-52; the shifted value fits 52 bits so the
// exponent-magic u64->f64 conversion is exact.
inline __m256d words_to_unit(__m256i w) {
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);  // 2^52
    __m256i v = _mm256_srli_epi64(w, 12);
    __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic)),
                              _mm256_set1_pd(0x1.0p52));
    return _mm256_mul_pd(_mm256_add_pd(d, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1.0p-52));
}

void uniform_fill_avx2(const StreamKey& k, std::uint64_t i0, std::size_t n, double* out) {
    std::size_t j = 0;
    while (j < n && ((i0 + j) & 1)) out[j] = bits_to_unit(raw_bits(k, i0 + j)), ++j;
    while (n - j >= 8) {
        __m256i even, odd;
        draw_words(k, (i0 + j) >> 1, even, odd);
        __m256i lo = _mm256_unpacklo_epi64(even, odd);   // e0 o0 | e2 o2
        __m256i hi = _mm256_unpackhi_epi64(even, odd);   // e1 o1 | e3 o3
        __m256i r0 = _mm256_permute2x128_si256(lo, hi, 0x20);
        __m256i r1 = _mm256_permute2x128_si256(lo, hi, 0x31);
        _mm256_storeu_pd(out + j, words_to_unit(r0));
        _mm256_storeu_pd(out + j + 4, words_to_unit(r1));
        j += 8;
    }
    for (; j < n; ++j) out[j] = bits_to_unit(raw_bits(k, i0 + j));
}

std::uint64_t bernoulli_count_avx2(const StreamKey& k, std::uint64_t i0, std::uint64_t n, double p) {
    const std::uint64_t thr = bernoulli_threshold(p);
    const __m256i vthr = _mm256_set1_epi64x(static_cast<long long>(thr));
    std::uint64_t cnt = 0, j = 0;
    while (j < n && ((i0 + j) & 1)) cnt += (raw_bits(k, i0 + j) >> 12) < thr, ++j;
    __m256i acc = _mm256_setzero_si256();
    while (n - j >= 8) {
        __m256i even, odd;
        draw_words(k, (i0 + j) >> 1, even, odd);
        // shifted values < 2^52, so signed 64-bit compare is safe
        acc = _mm256_sub_epi64(acc, _mm256_cmpgt_epi64(vthr, _mm256_srli_epi64(even, 12)));
        acc = _mm256_sub_epi64(acc, _mm256_cmpgt_epi64(vthr, _mm256_srli_epi64(odd, 12)));
        j += 8;
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    cnt += lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; j < n; ++j) cnt += (raw_bits(k, i0 + j) >> 12) < thr;
    return cnt;
}

// exp(x) for x <= 0, lane-wise identical to detail::exp_neg.
inline __m256d exp_neg_vec(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    __m256d clamped = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
    __m256d nf = _mm256_round_pd(_mm256_mul_pd(clamped, log2e),
                                 _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_setzero_pd(), nf), ln2_hi, clamped);
    r = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_setzero_pd(), nf), ln2_lo, r);
    __m256d p = _mm256_set1_pd(1.0 / kExpOrder);
    for (int kk = kExpOrder - 1; kk >= 1; --kk) {
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
        p = _mm256_div_pd(p, _mm256_set1_pd(static_cast<double>(kk)));
    }
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    // scale by 2^n via exponent arithmetic (n >= -1022 after the clamp)
    __m128i n32 = _mm256_cvtpd_epi32(nf);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i pow2 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    __m256d scaled = _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));
    __m256d zero_mask = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
    return _mm256_andnot_pd(zero_mask, scaled);
}

inline __m256d phi_pdf_vec(__m256d x) {
    __m256d e = exp_neg_vec(_mm256_mul_pd(_mm256_set1_pd(-0.5), _mm256_mul_pd(x, x)));
    return _mm256_mul_pd(_mm256_set1_pd(kInvSqrt2Pi), e);
}

inline __m256d norm_cdf_vec(__m256d x) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d ax = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
    // series branch
    __m256d x2 = _mm256_mul_pd(ax, ax);
    __m256d term = ax, s = ax;
    for (int nn = 1; nn < kSeriesTerms; ++nn) {
        term = _mm256_div_pd(_mm256_mul_pd(term, x2), _mm256_set1_pd(2.0 * nn + 1.0));
        s = _mm256_add_pd(s, term);
    }
    __m256d pdf = phi_pdf_vec(ax);
    __m256d vs = _mm256_fmadd_pd(pdf, s, half);
    __m256d series_pos = vs, series_neg = _mm256_sub_pd(one, vs);
    // Mills branch
    __m256d f = ax;
    for (int kk = kMillsDepth; kk >= 1; --kk)
        f = _mm256_add_pd(ax, _mm256_div_pd(_mm256_set1_pd(static_cast<double>(kk)), f));
    __m256d q = _mm256_div_pd(pdf, f);
    __m256d mills_pos = _mm256_sub_pd(one, q), mills_neg = q;
    __m256d use_series = _mm256_cmp_pd(ax, _mm256_set1_pd(kSeriesCut), _CMP_LE_OQ);
    __m256d pos = _mm256_blendv_pd(mills_pos, series_pos, use_series);
    __m256d neg = _mm256_blendv_pd(mills_neg, series_neg, use_series);
    __m256d xpos = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GE_OQ);
    return _mm256_blendv_pd(neg, pos, xpos);
}

void norm_cdf_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, norm_cdf_vec(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = detail::norm_cdf_one(x[i]);
}

void norm_pdf_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, phi_pdf_vec(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = detail::phi_pdf(x[i]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d vacc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vacc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), vacc);
    alignas(32) double acc[4];
    _mm256_store_pd(acc, vacc);
    for (int l = 0; i < n; ++i, ++l)
        acc[l] = std::fma(a[i], b[i], acc[l]);
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{"avx2", uniform_fill_avx2, bernoulli_count_avx2,
                           norm_cdf_avx2, norm_pdf_avx2, dot_avx2};
    return k;
}

}  // namespace adapt::simd
