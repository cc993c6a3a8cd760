#include "adapt/model/family.hpp"

#include <algorithm>
#include <cmath>

#include "adapt/num/brent.hpp"

namespace adapt {

namespace {

double bern_kl(double p, double q) {
    double a = (p > 0.0) ? p * std::log(p / q) : 0.0;
    double b = (p < 1.0) ? (1.0 - p) * std::log((1.0 - p) / (1.0 - q)) : 0.0;
    return a + b;
}

double binomial_objective(double p1h, double p2h, double p, double delta) {
    return bern_kl(p1h, p) + bern_kl(p2h, p + delta);
}

}  // namespace

void FamilySpec::validate() const {
    if (kind == FamilyKind::NormalKnownVar && !(sigma > 0.0))
        throw std::invalid_argument("FamilySpec: sigma must be positive");
}

std::string FamilySpec::name() const {
    switch (kind) {
        case FamilyKind::NormalKnownVar: return "normal";
        case FamilyKind::NormalUnknownVar: return "normal_unknown_var";
        case FamilyKind::TwoSampleBinomial: return "two_binomial";
    }
    return "?";
}

double u_of(const FamilySpec& f, const Theta& t) {
    switch (f.kind) {
        case FamilyKind::NormalKnownVar: return t.c1;
        case FamilyKind::NormalUnknownVar: return t.c1;
        case FamilyKind::TwoSampleBinomial: return t.c2 - t.c1;
    }
    return 0.0;
}

Theta mle(const FamilySpec& f, const SuffStat& s) {
    switch (f.kind) {
        case FamilyKind::NormalKnownVar:
            if (s.n < 1) throw InsufficientData("mle: need n >= 1");
            return {s.s1 / static_cast<double>(s.n), 0.0};
        case FamilyKind::NormalUnknownVar: {
            if (s.n < 2) throw InsufficientData("mle: need n >= 2 for unknown variance");
            double n = static_cast<double>(s.n);
            double xb = s.s1 / n;
            double v = std::max(s.s2 / n - xb * xb, 0.0);
            return {xb, std::sqrt(v)};
        }
        case FamilyKind::TwoSampleBinomial:
            if (s.n < 1) throw InsufficientData("mle: need n >= 1");
            return {s.s1 / static_cast<double>(s.n), s.s2 / static_cast<double>(s.n)};
    }
    return {};
}

double kl(const FamilySpec& f, const Theta& theta, const Theta& lambda) {
    switch (f.kind) {
        case FamilyKind::NormalKnownVar: {
            double d = theta.c1 - lambda.c1;
            return d * d / (2.0 * f.sigma * f.sigma);
        }
        case FamilyKind::NormalUnknownVar: {
            double s1 = theta.c2, s2 = lambda.c2;
            double d = theta.c1 - lambda.c1;
            return std::log(s2 / s1) + (s1 * s1 + d * d) / (2.0 * s2 * s2) - 0.5;
        }
        case FamilyKind::TwoSampleBinomial:
            return bern_kl(theta.c1, lambda.c1) + bern_kl(theta.c2, lambda.c2);
    }
    return 0.0;
}

double binomial_profile_p(double p1h, double p2h, double delta) {
    const double lo = std::max(0.0, -delta) + 1e-9;
    const double hi = std::min(1.0, 1.0 - delta) - 1e-9;
    if (!(lo < hi)) throw ConstraintInfeasible("binomial constraint empty at delta");
    return num::brent_minimize(
        [&](double p) { return binomial_objective(p1h, p2h, p, delta); }, lo, hi, 1e-10);
}

double constrained_kl(const FamilySpec& f, const Theta& theta_hat, double delta) {
    switch (f.kind) {
        case FamilyKind::NormalKnownVar: {
            double d = theta_hat.c1 - delta;
            return d * d / (2.0 * f.sigma * f.sigma);
        }
        case FamilyKind::NormalUnknownVar: {
            double r = (theta_hat.c1 - delta) / theta_hat.c2;
            return 0.5 * std::log1p(r * r);
        }
        case FamilyKind::TwoSampleBinomial: {
            if (delta <= -1.0 || delta >= 1.0)
                throw ConstraintInfeasible("two_binomial: delta outside (-1,1)");
            double ps = binomial_profile_p(theta_hat.c1, theta_hat.c2, delta);
            return binomial_objective(theta_hat.c1, theta_hat.c2, ps, delta);
        }
    }
    return 0.0;
}

double signed_root(const FamilySpec& f, std::int64_t n, const Theta& theta_hat, double delta) {
    double gap = u_of(f, theta_hat) - delta;
    double s = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
    return s * std::sqrt(2.0 * static_cast<double>(n) * constrained_kl(f, theta_hat, delta));
}

double arcsine_stat(const SuffStat& s) {
    if (s.n < 1) throw InsufficientData("arcsine_stat: need n >= 1");
    double n = static_cast<double>(s.n);
    double p1 = s.s1 / n, p2 = s.s2 / n;
    return std::sqrt(2.0 * n) * (std::asin(std::sqrt(p1)) - std::asin(std::sqrt(p2)));
}

Theta clip_binomial(const Theta& t, std::int64_t n) {
    double lo = 0.5 / static_cast<double>(n);
    return {std::clamp(t.c1, lo, 1.0 - lo), std::clamp(t.c2, lo, 1.0 - lo)};
}

double glr_stat(const FamilySpec& f, const SuffStat& s, double delta) {
    Theta th = mle(f, s);
    if (f.kind == FamilyKind::TwoSampleBinomial) th = clip_binomial(th, s.n);
    return static_cast<double>(s.n) * constrained_kl(f, th, delta);
}

}  // namespace adapt
