#pragma once
#include <cstdint>
#include <stdexcept>

#include "adapt/model/family.hpp"

namespace adapt {

// Full parameterization of one three-stage adaptive test.
struct DesignParams {
    FamilySpec family;
    double u0 = 0.0;          // null boundary value of the functional
    double u1 = 0.3;          // alternative (u1 > u0)
    double alpha = 0.025;     // type I error
    double alpha_tilde = 0.1; // type II error at u1
    std::int64_t m = 40;      // first-stage size (per group for binomial)
    std::int64_t M = 120;     // maximum size
    double eps = 1.0 / 3.0;        // share of alpha spent before the final stage
    double eps_tilde = 1.0 / 3.0;  // share of alpha_tilde spent before the final stage
    double rho_m = 0.1;       // sample-size inflation factor

    // Throws on hard violations; returns a warning string ("" if none) for
    // the recommended-band checks.
    std::string validate() const;
};

struct DivergingSize : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hoeffding-bound sample-size function
//   n(theta) = min(|log a| / inf_{u(l)=u0} I(theta,l), |log at| / inf_{u(l)=u1} I(theta,l));
// +inf when both information numbers vanish never occurs since u0 != u1.
double hoeffding_n(const DesignParams& d, const Theta& theta);

// Alternative at which the level-alpha fixed test with M observations has
// power 1 - alpha_tilde; closed form for the normal case, signed-root normal
// approximation (same closed form on the u-scale) otherwise.
double implied_alternative(const FamilySpec& family, std::int64_t M, double alpha,
                           double alpha_tilde, double u0);

// Second-stage size m v { M ^ ceil((1 + rho_m) n(theta_hat)) }.
std::int64_t second_stage_n(const DesignParams& d, const Theta& theta_hat_m);

// ceil(n(theta_low) ^ n(theta_high)); errors if the suggestion diverges.
std::int64_t suggested_first_stage(const DesignParams& d, double theta_low, double theta_high);

}  // namespace adapt
