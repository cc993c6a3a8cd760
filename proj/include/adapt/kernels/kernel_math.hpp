#pragma once
#include <cmath>

// Branch-free-friendly normal cdf/pdf pieces shared by the scalar reference
// and mirrored lane-wise by the AVX2 variant. Series/continued-fraction
// depths are fixed so both paths perform identical arithmetic.
namespace adapt::simd::detail {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;
inline constexpr int kExpOrder = 13;
inline constexpr int kSeriesTerms = 48;    // Phi series, used for |x| <= 3
inline constexpr int kMillsDepth = 64;     // Mills-ratio CF, used for |x| > 3
inline constexpr double kSeriesCut = 3.0;

// exp(x) for x <= 0 (clamped to 0 below -708): round-to-nearest power-of-two
// reduction plus a fixed-order Taylor polynomial in [-ln2/2, ln2/2].
inline double exp_neg(double x) {
    if (x < -708.0) return 0.0;
    const double log2e = 1.4426950408889634074;
    const double ln2_hi = 6.93147180369123816490e-01;
    const double ln2_lo = 1.90821492927058770002e-10;
    double nf = std::nearbyint(x * log2e);
    double r = std::fma(-nf, ln2_hi, x);
    r = std::fma(-nf, ln2_lo, r);
    double p = 1.0 / kExpOrder;
    for (int k = kExpOrder - 1; k >= 1; --k)
        p = std::fma(p, r, 1.0) / k;
    p = std::fma(p, r, 1.0);
    return std::ldexp(p, static_cast<int>(nf));
}

inline double phi_pdf(double x) { return kInvSqrt2Pi * exp_neg(-0.5 * x * x); }

// Phi(x) = 1/2 + phi(x) * (x + x^3/3 + x^5/(3*5) + ...), all-positive terms.
inline double cdf_series(double ax) {
    double x2 = ax * ax;
    double term = ax, s = ax;
    for (int n = 1; n < kSeriesTerms; ++n) {
        term = term * x2 / (2.0 * n + 1.0);
        s += term;
    }
    return s;
}

// Mills ratio tail: 1 - Phi(ax) = phi(ax) / (ax + 1/(ax + 2/(ax + ...))).
inline double mills_denom(double ax) {
    double f = ax;
    for (int k = kMillsDepth; k >= 1; --k)
        f = ax + k / f;
    return f;
}

inline double norm_cdf_one(double x) {
    double ax = std::fabs(x);
    if (ax <= kSeriesCut) {
        double s = cdf_series(ax);
        double v = std::fma(phi_pdf(ax), s, 0.5);
        return x >= 0.0 ? v : 1.0 - v;
    }
    double q = phi_pdf(ax) / mills_denom(ax);
    return x > 0.0 ? 1.0 - q : q;
}

}  // namespace adapt::simd::detail
