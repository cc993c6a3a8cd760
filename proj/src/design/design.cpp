#include "adapt/design/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapt/num/brent.hpp"
#include "adapt/num/normal.hpp"

namespace adapt {

std::string DesignParams::validate() const {
    family.validate();
    if (m < 1 || M < 1 || m > M) throw std::invalid_argument("design: need 1 <= m <= M");
    if (!(u1 > u0)) throw std::invalid_argument("design: need u1 > u0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("design: alpha outside (0,1)");
    if (!(alpha_tilde > 0.0 && alpha_tilde < 1.0))
        throw std::invalid_argument("design: alpha_tilde outside (0,1)");
    if (!(alpha + alpha_tilde < 1.0))
        throw std::invalid_argument("design: alpha + alpha_tilde must be < 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("design: eps outside (0,1)");
    if (!(eps_tilde > 0.0 && eps_tilde < 1.0))
        throw std::invalid_argument("design: eps_tilde outside (0,1)");
    if (!(rho_m >= 0.0)) throw std::invalid_argument("design: rho_m must be >= 0");
    if (family.kind == FamilyKind::TwoSampleBinomial && (u1 >= 1.0 || u0 <= -1.0))
        throw std::invalid_argument("design: binomial u-values outside (-1,1)");
    std::string warn;
    if (eps < 0.2 || eps > 0.8 || eps_tilde < 0.2 || eps_tilde > 0.8)
        warn = "eps/eps_tilde outside the recommended band [0.2, 0.8]";
    return warn;
}

double hoeffding_n(const DesignParams& d, const Theta& theta) {
    const double la = std::fabs(std::log(d.alpha));
    const double lat = std::fabs(std::log(d.alpha_tilde));
    double i0 = constrained_kl(d.family, theta, d.u0);
    double i1 = constrained_kl(d.family, theta, d.u1);
    double t0 = i0 > 0.0 ? la / i0 : std::numeric_limits<double>::infinity();
    double t1 = i1 > 0.0 ? lat / i1 : std::numeric_limits<double>::infinity();
    return std::min(t0, t1);
}

double implied_alternative(const FamilySpec& family, std::int64_t M, double alpha,
                           double alpha_tilde, double u0) {
    const double za = num::upper_quantile(alpha);
    const double zat = num::upper_quantile(alpha_tilde);
    const double normal_u1 = u0 + (za + zat) / std::sqrt(static_cast<double>(M));
    if (family.kind == FamilyKind::NormalKnownVar && family.sigma == 1.0) return normal_u1;
    if (family.kind == FamilyKind::NormalKnownVar)
        return u0 + family.sigma * (za + zat) / std::sqrt(static_cast<double>(M));
    // Signed-root scale: l_M(u0) is ~N(sqrt(2 M K(u1, u0)), 1) at the
    // alternative, so solve 2 M K = (za + zat)^2 for u1 by bisection.
    const double target = (za + zat) * (za + zat) / (2.0 * static_cast<double>(M));
    const double hi_limit = family.kind == FamilyKind::NormalUnknownVar ? 10.0 : 0.999;
    auto gap = [&](double u1) {
        Theta th = family.kind == FamilyKind::NormalUnknownVar
                       ? Theta{u1, 1.0}
                       : Theta{0.5 - (u1 - u0) / 2.0, 0.5 + (u1 - u0) / 2.0};
        return constrained_kl(family, th, u0) - target;
    };
    return num::brent_root(gap, u0 + 1e-12, u0 + hi_limit, 1e-8);
}

std::int64_t second_stage_n(const DesignParams& d, const Theta& theta_hat_m) {
    double n = hoeffding_n(d, theta_hat_m);
    if (std::isinf(n)) return d.M;
    double inflated = std::ceil((1.0 + d.rho_m) * n);
    double clamped = std::max(static_cast<double>(d.m),
                              std::min(static_cast<double>(d.M), inflated));
    return static_cast<std::int64_t>(clamped);
}

std::int64_t suggested_first_stage(const DesignParams& d, double theta_low, double theta_high) {
    if (!(theta_low < d.u0) || !(theta_high > d.u1))
        throw std::invalid_argument("suggested_first_stage: need theta_low < u0 < u1 < theta_high");
    Theta lo{theta_low, d.family.kind == FamilyKind::NormalUnknownVar ? 1.0 : 0.0};
    Theta hi{theta_high, lo.c2};
    double n = std::min(hoeffding_n(d, lo), hoeffding_n(d, hi));
    if (!(n <= 1e6)) throw DivergingSize("suggested_first_stage: suggestion exceeds 1e6");
    return static_cast<std::int64_t>(std::ceil(n));
}

}  // namespace adapt
