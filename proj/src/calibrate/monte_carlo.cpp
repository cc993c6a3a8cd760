#include <algorithm>
#include <cmath>
#include <thread>

#include "adapt/calibrate/calibrate.hpp"
#include "adapt/sim/streams.hpp"

namespace adapt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stopping statistics along one path. Gates follow the stopping rules:
// rejection-side values only exist when u(theta_hat) > u0, futility-side
// when u(theta_hat) < u1.
PathRecord make_record(const DesignParams& d, const SuffStat& sm, const SuffStat& sk,
                       const SuffStat& sM, std::int64_t k) {
    PathRecord r{};
    r.k = static_cast<std::int32_t>(k);
    r.mid = (k > d.m && k < d.M);
    Theta th1 = mle(d.family, sm);
    double u1h = u_of(d.family, th1);
    r.r1 = u1h > d.u0 ? glr_stat(d.family, sm, d.u0) : kNegInf;
    r.f1 = u1h < d.u1 ? glr_stat(d.family, sm, d.u1) : kNegInf;
    if (r.mid) {
        Theta th2 = mle(d.family, sk);
        double u2h = u_of(d.family, th2);
        r.r2 = u2h > d.u0 ? glr_stat(d.family, sk, d.u0) : kNegInf;
        r.f2 = u2h < d.u1 ? glr_stat(d.family, sk, d.u1) : kNegInf;
    } else {
        r.r2 = r.f2 = kNegInf;
    }
    Theta thM = mle(d.family, sM);
    r.cfin = u_of(d.family, thM) > d.u0 ? glr_stat(d.family, sM, d.u0) : kNegInf;
    return r;
}

PathRecord simulate_path(const DesignParams& d, const Theta& truth, std::uint64_t seed,
                         std::uint32_t tag, std::uint32_t rep) {
    if (d.family.kind == FamilyKind::NormalKnownVar) {
        // sums at the analysis points only; three su sufficient draws per path
        simd::StreamKey key{seed, 0, tag, rep};
        auto z = [&](std::uint64_t i) {
            return num::norm_quantile(simd::bits_to_unit(simd::raw_bits(key, i)));
        };
        double sg = d.family.sigma;
        double m = static_cast<double>(d.m);
        SuffStat sm{d.m, truth.c1 * m + sg * std::sqrt(m) * z(0), 0.0};
        Theta th1 = mle(d.family, sm);
        std::int64_t k = second_stage_n(d, th1);
        SuffStat sk = sm;
        if (k > d.m) {
            double j = static_cast<double>(k - d.m);
            sk = SuffStat{k, sm.s1 + truth.c1 * j + sg * std::sqrt(j) * z(1), 0.0};
        }
        SuffStat sM = sk;
        if (d.M > k) {
            double j = static_cast<double>(d.M - k);
            sM = SuffStat{d.M, sk.s1 + truth.c1 * j + sg * std::sqrt(j) * z(2), 0.0};
        }
        return make_record(d, sm, sk, sM, k);
    }
    SuffStatStream stream(d.family, truth, seed, tag, rep);
    SuffStat sm = stream.at(d.m);
    Theta th1 = mle(d.family, sm);
    std::int64_t k = second_stage_n(d, th1);
    SuffStat sk = stream.at(k);
    SuffStat sM = stream.at(d.M);
    return make_record(d, sm, sk, sM, k);
}

// Fixed-look variant: record the first two looks and the final one.
PathRecord simulate_path_fixed(const DesignParams& d, const std::vector<std::int64_t>& looks,
                               const Theta& truth, std::uint64_t seed, std::uint32_t tag,
                               std::uint32_t rep) {
    SuffStatStream stream(d.family, truth, seed, tag, rep);
    SuffStat sm = stream.at(looks[0]);
    std::int64_t mid = looks.size() > 2 ? looks[1] : looks[0];
    SuffStat sk = stream.at(mid);
    SuffStat sM = stream.at(looks.back());
    DesignParams d2 = d;
    d2.m = looks[0];
    d2.M = looks.back();
    return make_record(d2, sm, sk, sM, mid);
}

template <class PathFn>
std::vector<PathRecord> run_partitioned(std::int64_t reps, int threads, PathFn&& fn) {
    std::vector<PathRecord> out(static_cast<std::size_t>(reps));
    int nt = std::max(1, threads);
    if (nt == 1) {
        for (std::int64_t i = 0; i < reps; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::int64_t chunk = (reps + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::int64_t lo = t * chunk, hi = std::min(reps, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::int64_t i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

// Smallest threshold with #{v >= thr} equal to the target count; placed
// between order statistics so the count is stable under ties at the value.
double quantile_threshold(std::vector<double>& v, std::int64_t count) {
    const std::int64_t n = static_cast<std::int64_t>(v.size());
    if (count < 1) count = 1;
    if (count >= n) count = n - 1;
    auto kth = v.begin() + (count - 1);
    std::nth_element(v.begin(), kth, v.end(), std::greater<double>());
    double upper = *kth;
    double lower = *std::max_element(kth + 1, v.end());
    if (std::isinf(upper) && upper < 0) return 1e300;  // fewer finite values than count
    return std::isinf(lower) && lower < 0 ? upper : 0.5 * (upper + lower);
}

}  // namespace

Ensemble simulate_ensemble(const DesignParams& d, const Theta& truth, std::uint64_t seed,
                           std::uint32_t ensemble_tag, std::int64_t reps, int threads) {
    Ensemble e;
    e.at = truth;
    e.paths = run_partitioned(reps, threads, [&](std::int64_t i) {
        return simulate_path(d, truth, seed, ensemble_tag, static_cast<std::uint32_t>(i));
    });
    return e;
}

void mc_spends(const DesignParams&, const Ensemble& null_ens, const Ensemble& alt_ens,
               const Thresholds& t, double out[3]) {
    std::int64_t c7 = 0, c8 = 0, c9 = 0;
    for (const PathRecord& p : alt_ens.paths) {
        double v7 = std::max(p.f1, p.mid ? p.f2 : kNegInf);
        c7 += v7 >= t.b_tilde;
    }
    for (const PathRecord& p : null_ens.paths) {
        double v8 = p.f1 >= t.b_tilde ? p.r1 : std::max(p.r1, p.mid ? p.r2 : kNegInf);
        c8 += v8 >= t.b;
        bool reach = p.r1 < t.b && p.f1 < t.b_tilde &&
                     (!p.mid || (p.r2 < t.b && p.f2 < t.b_tilde));
        c9 += reach && p.cfin >= t.c;
    }
    out[0] = static_cast<double>(c7) / static_cast<double>(alt_ens.paths.size());
    out[1] = static_cast<double>(c8) / static_cast<double>(null_ens.paths.size());
    out[2] = static_cast<double>(c9) / static_cast<double>(null_ens.paths.size());
}

namespace {

CalibrationReport solve_on_ensembles(const DesignParams& d, const Ensemble& null_ens,
                                     const Ensemble& alt_ens) {
    const std::int64_t reps = static_cast<std::int64_t>(null_ens.paths.size());
    const double t7 = d.eps_tilde * d.alpha_tilde;
    const double t8 = d.eps * d.alpha;
    const double t9 = (1.0 - d.eps) * d.alpha;

    std::vector<double> v(static_cast<std::size_t>(reps));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const PathRecord& p = alt_ens.paths[i];
        v[i] = std::max(p.f1, p.mid ? p.f2 : kNegInf);
    }
    double bt = quantile_threshold(v, std::llround(t7 * static_cast<double>(reps)));

    for (std::size_t i = 0; i < v.size(); ++i) {
        const PathRecord& p = null_ens.paths[i];
        v[i] = p.f1 >= bt ? p.r1 : std::max(p.r1, p.mid ? p.r2 : kNegInf);
    }
    double b = quantile_threshold(v, std::llround(t8 * static_cast<double>(reps)));

    for (std::size_t i = 0; i < v.size(); ++i) {
        const PathRecord& p = null_ens.paths[i];
        bool reach = p.r1 < b && p.f1 < bt && (!p.mid || (p.r2 < b && p.f2 < bt));
        v[i] = reach ? p.cfin : kNegInf;
    }
    double c = quantile_threshold(v, std::llround(t9 * static_cast<double>(reps)));

    CalibrationReport rep;
    rep.method = CalibrationMethod::MonteCarlo;
    rep.thresholds = {b, bt, c};
    rep.reps_or_nodes = reps;
    mc_spends(d, null_ens, alt_ens, rep.thresholds, rep.achieved);
    return rep;
}

}  // namespace

CalibrationReport calibrate_monte_carlo(const DesignParams& d, const MonteCarloSettings& ms) {
    Theta tnull, talt;
    switch (d.family.kind) {
        case FamilyKind::NormalKnownVar:
            tnull = {d.u0, 0.0};
            talt = {d.u1, 0.0};
            break;
        case FamilyKind::NormalUnknownVar:
            tnull = {d.u0, 1.0};
            talt = {d.u1, 1.0};
            break;
        case FamilyKind::TwoSampleBinomial:
            tnull = {ms.p_null, ms.p_null + d.u0};
            talt = {ms.p_null - (d.u1 - d.u0) / 2.0 + d.u0 / 2.0,
                    ms.p_null + (d.u1 - d.u0) / 2.0 + d.u0 / 2.0};
            break;
    }
    if (ms.theta_null) tnull = *ms.theta_null;
    if (ms.theta_alt) talt = *ms.theta_alt;

    Ensemble null_ens = simulate_ensemble(d, tnull, ms.seed, 0, ms.reps, ms.threads);
    Ensemble alt_ens = simulate_ensemble(d, talt, ms.seed, 1, ms.reps, ms.threads);
    CalibrationReport rep = solve_on_ensembles(d, null_ens, alt_ens);
    rep.seed = ms.seed;
    return rep;
}

CalibrationReport calibrate(const DesignParams& d, CalibrationMethod method,
                            const QuadratureSettings& qs, const MonteCarloSettings& ms) {
    if (method == CalibrationMethod::Quadrature) return calibrate_quadrature(d, qs);
    return calibrate_monte_carlo(d, ms);
}

CalibrationReport calibrate_fixed_looks(const DesignParams& d,
                                        const std::vector<std::int64_t>& looks,
                                        const MonteCarloSettings& ms) {
    if (looks.size() < 2) throw std::invalid_argument("calibrate_fixed_looks: need >= 2 looks");
    Theta tnull, talt;
    switch (d.family.kind) {
        case FamilyKind::NormalKnownVar:
            tnull = {d.u0, 0.0};
            talt = {d.u1, 0.0};
            break;
        case FamilyKind::NormalUnknownVar:
            tnull = {d.u0, 1.0};
            talt = {d.u1, 1.0};
            break;
        case FamilyKind::TwoSampleBinomial:
            tnull = {ms.p_null, ms.p_null + d.u0};
            talt = {ms.p_null - (d.u1 - d.u0) / 2.0 + d.u0 / 2.0,
                    ms.p_null + (d.u1 - d.u0) / 2.0 + d.u0 / 2.0};
            break;
    }
    if (ms.theta_null) tnull = *ms.theta_null;
    if (ms.theta_alt) talt = *ms.theta_alt;

    auto build = [&](const Theta& truth, std::uint32_t tag) {
        Ensemble e;
        e.at = truth;
        e.paths = run_partitioned(ms.reps, ms.threads, [&](std::int64_t i) {
            return simulate_path_fixed(d, looks, truth, ms.seed, tag, static_cast<std::uint32_t>(i));
        });
        return e;
    };
    Ensemble null_ens = build(tnull, 0);
    Ensemble alt_ens = build(talt, 1);
    DesignParams d2 = d;
    d2.m = looks.front();
    d2.M = looks.back();
    CalibrationReport rep = solve_on_ensembles(d2, null_ens, alt_ens);
    rep.seed = ms.seed;
    return rep;
}

}  // namespace adapt
