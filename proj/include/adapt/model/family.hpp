#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>

namespace adapt {

enum class FamilyKind { NormalKnownVar, NormalUnknownVar, TwoSampleBinomial };

// One of the three supported exponential-family models. u() is the family's
// scalar functional of interest: the mean, the mean (variance a nuisance),
// and the difference p2 - p1 respectively.
struct FamilySpec {
    FamilyKind kind = FamilyKind::NormalKnownVar;
    double sigma = 1.0;  // NormalKnownVar only

    int dimension() const { return kind == FamilyKind::NormalKnownVar ? 1 : 2; }
    void validate() const;
    std::string name() const;
};

// Cumulative sufficient statistic. Per family:
//   NormalKnownVar:    n, s1 = sum x_i
//   NormalUnknownVar:  n, s1 = sum x_i, s2 = sum x_i^2
//   TwoSampleBinomial: n = per-group count, s1/s2 = successes in group 1/2
struct SuffStat {
    std::int64_t n = 0;
    double s1 = 0.0;
    double s2 = 0.0;
};

// Parameter point; c1/c2 per family: (theta), (mu, sigma>0), (p1, p2).
struct Theta {
    double c1 = 0.0;
    double c2 = 0.0;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstraintInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value of the family's functional at theta.
double u_of(const FamilySpec& f, const Theta& t);

// Maximum likelihood estimate (divide-by-n variance for NormalUnknownVar).
Theta mle(const FamilySpec& f, const SuffStat& s);

// Kullback-Leibler information I(theta, lambda).
double kl(const FamilySpec& f, const Theta& theta, const Theta& lambda);

// inf over {lambda : u(lambda) = delta} of I(theta_hat, lambda).
double constrained_kl(const FamilySpec& f, const Theta& theta_hat, double delta);

// sign(u(theta_hat) - delta) * sqrt(2 n constrained_kl); ~N(0,1) under u=delta.
double signed_root(const FamilySpec& f, std::int64_t n, const Theta& theta_hat, double delta);

// Binomial variance-stabilized statistic sqrt(2n)*(asin sqrt(p1) - asin sqrt(p2)).
double arcsine_stat(const SuffStat& s);

// Proportions pushed off {0,1} to [1/(2n), 1 - 1/(2n)] before the GLR logs.
Theta clip_binomial(const Theta& t, std::int64_t n);

// GLR stopping statistic n * constrained_kl at the (clipped, for binomial) MLE.
double glr_stat(const FamilySpec& f, const SuffStat& s, double delta);

// Profile nuisance argmin for the binomial constrained KL (exposed for tests).
double binomial_profile_p(double p1_hat, double p2_hat, double delta);

}  // namespace adapt
