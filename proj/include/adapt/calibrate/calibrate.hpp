#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adapt/design/design.hpp"

namespace adapt {

// Calibrated stopping thresholds: early rejection b, early futility b_tilde,
// final rejection c. b in (4)/(27), b_tilde in (5)/(28), c in (6)/(29).
struct Thresholds {
    double b = 0.0;
    double b_tilde = 0.0;
    double c = 0.0;
    void validate() const;
};

enum class CalibrationMethod { Quadrature, MonteCarlo };

struct CalibrationReport {
    Thresholds thresholds;
    double achieved[3] = {0, 0, 0};  // attained LHS of the three spend equations
    CalibrationMethod method = CalibrationMethod::Quadrature;
    std::int64_t reps_or_nodes = 0;
    std::optional<std::uint64_t> seed;
};

// ---- normal known-variance spend equations (exact recursive integration) ----

struct QuadratureSettings {
    int outer_nodes = 512;   // budget across the outer band, split at k(x) steps
    int inner_nodes = 256;   // per-x nodes for the final-stage double integral
    double refine_tol = 1e-6;
    int max_doublings = 4;
};

// pr_{u1}{ futility fires at stage 1 or 2 }, stage-2 reachability gated by
// the futility boundary only (the rejection boundary does not enter, so the
// equation can be solved for b_tilde first).
double futility_spend(const DesignParams& d, double b_tilde,
                      const QuadratureSettings& qs = {});

// pr_{u0}{ no futility by stage 2 and early rejection fires at stage 1 or 2 }.
double early_reject_spend(const DesignParams& d, double b_tilde, double b,
                          const QuadratureSettings& qs = {});

// pr_{u0}{ trial reaches the final analysis and rejects there }.
double final_reject_spend(const DesignParams& d, const Thresholds& t,
                          const QuadratureSettings& qs = {});

// Solve the three spend equations in succession for (b_tilde, b, c).
CalibrationReport calibrate_quadrature(const DesignParams& d,
                                       const QuadratureSettings& qs = {});

// ---- Monte Carlo calibration (any family) ----

struct MonteCarloSettings {
    std::int64_t reps = 1'000'000;
    std::uint64_t seed = 1;
    int threads = 1;
    // Nuisance placement. Null ensemble at u = u0, alternative at u = u1.
    // Binomial: null at (p_null, p_null + u0), alternative centered on p_null
    // with gap u1 unless explicit points are given.
    double p_null = 0.5;
    std::optional<Theta> theta_null;
    std::optional<Theta> theta_alt;
};

// Per-replicate stopping statistics, threshold-free. k is the data-driven
// second-stage size; mid means m < k < M (a real middle analysis exists).
struct PathRecord {
    double r1, f1, r2, f2, cfin;
    std::int32_t k;
    bool mid;
};

struct Ensemble {
    std::vector<PathRecord> paths;
    Theta at;
};

Ensemble simulate_ensemble(const DesignParams& d, const Theta& truth,
                           std::uint64_t seed, std::uint32_t ensemble_tag,
                           std::int64_t reps, int threads);

// The three spend-equation left sides evaluated on fixed ensembles.
void mc_spends(const DesignParams& d, const Ensemble& null_ens, const Ensemble& alt_ens,
               const Thresholds& t, double out[3]);

// Solve the spend equations on fixed common-random-number ensembles
// (deterministic in (seed, reps); invariant to thread partitioning).
CalibrationReport calibrate_monte_carlo(const DesignParams& d, const MonteCarloSettings& ms);

// Dispatch per the spec'd contract: quadrature only for the normal
// known-variance family.
CalibrationReport calibrate(const DesignParams& d, CalibrationMethod method,
                            const QuadratureSettings& qs, const MonteCarloSettings& ms);

// Group-sequential variant: fixed look sizes instead of the adaptive second
// stage (used by the Lai-Shih comparator).
CalibrationReport calibrate_fixed_looks(const DesignParams& d,
                                        const std::vector<std::int64_t>& looks,
                                        const MonteCarloSettings& ms);

}  // namespace adapt
