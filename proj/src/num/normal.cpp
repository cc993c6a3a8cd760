#include "adapt/num/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adapt::num {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

namespace {

// p in (0, 1/2]: Newton stays on the small side where the erfc-backed cdf
// has full relative precision.
double quantile_lower_half(double p) {
    // Abramowitz-Stegun 26.2.22 seed, |error| < 3e-3
    const double t = std::sqrt(-2.0 * std::log(p));
    double x = -(t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t)));
    for (int it = 0; it < 3; ++it) {
        double d = norm_pdf(x);
        if (d <= 0.0) break;
        x -= (norm_cdf(x) - p) / d;
    }
    return x;
}

}  // namespace

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("norm_quantile: p outside [0,1]");
    }
    if (p == 0.5) return 0.0;
    return p < 0.5 ? quantile_lower_half(p) : -quantile_lower_half(1.0 - p);
}

double upper_quantile(double p) { return norm_quantile(1.0 - p); }

}  // namespace adapt::num
