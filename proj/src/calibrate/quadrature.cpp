#include <algorithm>
#include <cmath>
#include <set>

#include "adapt/calibrate/calibrate.hpp"
#include "adapt/kernels/kernels.hpp"
#include "adapt/num/brent.hpp"
#include "adapt/num/normal.hpp"

namespace adapt {

void Thresholds::validate() const {
    if (!(b > 0.0 && b_tilde > 0.0 && c > 0.0))
        throw std::invalid_argument("thresholds must be positive");
    if (!(b > b_tilde))
        throw std::invalid_argument("thresholds: need b > b_tilde (continuation region empty)");
}

namespace {

// Everything below works on the standardized scale: x = (S_m/m - u0)/sigma,
// so u0 = 0 and the alternative sits at t1 = (u1 - u0)/sigma.
struct NormalDesign {
    double t1;
    std::int64_t m, M;
    double la, lat, rho;

    double n_of(double x) const {
        double i0 = 0.5 * x * x;
        double i1 = 0.5 * (x - t1) * (x - t1);
        double a = i0 > 0.0 ? la / i0 : std::numeric_limits<double>::infinity();
        double b = i1 > 0.0 ? lat / i1 : std::numeric_limits<double>::infinity();
        return std::min(a, b);
    }
    std::int64_t k_of(double x) const {
        double n = n_of(x);
        if (std::isinf(n)) return M;
        double v = std::ceil((1.0 + rho) * n);
        return static_cast<std::int64_t>(
            std::max(static_cast<double>(m), std::min(static_cast<double>(M), v)));
    }
};

NormalDesign standardized(const DesignParams& d) {
    if (d.family.kind != FamilyKind::NormalKnownVar)
        throw std::invalid_argument("quadrature calibration requires the normal known-variance family");
    return {(d.u1 - d.u0) / d.family.sigma, d.m, d.M,
            std::fabs(std::log(d.alpha)), std::fabs(std::log(d.alpha_tilde)), d.rho_m};
}

// x-values where k(x) = clamp(ceil((1+rho) n(x))) steps; the integrands are
// smooth between consecutive breakpoints.
std::vector<double> k_breakpoints(const NormalDesign& nd, double lo, double hi) {
    std::set<double> pts;
    auto add = [&](double x) {
        if (x > lo && x < hi) pts.insert(x);
    };
    for (std::int64_t j = nd.m; j <= nd.M; ++j) {
        double r0 = std::sqrt(2.0 * (1.0 + nd.rho) * nd.la / static_cast<double>(j));
        add(r0);
        add(-r0);
        double r1 = std::sqrt(2.0 * (1.0 + nd.rho) * nd.lat / static_cast<double>(j));
        add(nd.t1 + r1);
        add(nd.t1 - r1);
    }
    double sa = std::sqrt(nd.la), sb = std::sqrt(nd.lat);
    if (sa != sb) add(sa * nd.t1 / (sa - sb));
    add(sa * nd.t1 / (sa + sb));
    return {pts.begin(), pts.end()};
}

// Piecewise Gauss-Legendre over [lo, hi] split at the breakpoints; the node
// budget is spread over the pieces proportionally to length.
template <class F>
double integrate(const NormalDesign& nd, double lo, double hi, int budget, F&& piece_eval) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> bps = k_breakpoints(nd, lo, hi);
    std::vector<double> edges;
    edges.push_back(lo);
    for (double b : bps) edges.push_back(b);
    edges.push_back(hi);
    double total_len = hi - lo;
    double sum = 0.0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        double a = edges[s], b = edges[s + 1];
        if (!(b > a)) continue;
        int n = std::max(8, static_cast<int>(std::lround(budget * (b - a) / total_len)));
        sum += piece_eval(a, b, n);
    }
    return sum;
}

struct NodeBatch {
    std::vector<double> x, w;
    void build(double a, double b, int n) {
        const auto& gl = num::gauss_legendre(static_cast<std::size_t>(n));
        x.resize(n);
        w.resize(n);
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < n; ++i) {
            x[i] = mid + half * gl.x[i];
            w[i] = half * gl.w[i];
        }
    }
};

double futility_spend_at(const NormalDesign& nd, double bt, int budget, int /*inner*/) {
    const auto& K = simd::active();
    const double m = static_cast<double>(nd.m);
    const double f1 = nd.t1 - std::sqrt(2.0 * bt / m);
    const double hi = nd.t1 + 10.0 / std::sqrt(m);
    double p1 = num::norm_cdf(-std::sqrt(2.0 * bt));

    NodeBatch nb;
    std::vector<double> arg, cdf, dens;
    double p2 = integrate(nd, f1, hi, budget, [&](double a, double b, int n) {
        nb.build(a, b, n);
        // k is constant on the piece
        std::int64_t k = nd.k_of(0.5 * (a + b));
        if (k <= nd.m || k >= nd.M) return 0.0;
        double kk = static_cast<double>(k);
        double root = std::sqrt(2.0 * bt * kk), sd = std::sqrt(kk - m);
        arg.resize(n); cdf.resize(n); dens.resize(n);
        for (int i = 0; i < n; ++i) arg[i] = (-m * (nb.x[i] - nd.t1) - root) / sd;
        K.norm_cdf(arg.data(), cdf.data(), n);
        for (int i = 0; i < n; ++i) arg[i] = (nb.x[i] - nd.t1) * std::sqrt(m);
        K.norm_pdf(arg.data(), dens.data(), n);
        for (int i = 0; i < n; ++i) dens[i] *= std::sqrt(m) * nb.w[i];
        return K.dot(cdf.data(), dens.data(), n);
    });
    return p1 + p2;
}

double early_reject_spend_at(const NormalDesign& nd, double bt, double b, int budget, int /*inner*/) {
    const auto& K = simd::active();
    const double m = static_cast<double>(nd.m);
    const double f1 = nd.t1 - std::sqrt(2.0 * bt / m);
    const double r1 = std::sqrt(2.0 * b / m);
    double p1 = num::norm_cdf(-std::sqrt(2.0 * b));
    if (!(f1 < r1)) return p1;

    NodeBatch nb;
    std::vector<double> arg, cdf, dens;
    double p2 = integrate(nd, f1, r1, budget, [&](double a, double bb, int n) {
        std::int64_t k = nd.k_of(0.5 * (a + bb));
        if (k <= nd.m || k >= nd.M) return 0.0;
        nb.build(a, bb, n);
        double kk = static_cast<double>(k);
        double root = std::sqrt(2.0 * b * kk), sd = std::sqrt(kk - m);
        arg.resize(n); cdf.resize(n); dens.resize(n);
        for (int i = 0; i < n; ++i) arg[i] = (m * nb.x[i] - root) / sd;
        K.norm_cdf(arg.data(), cdf.data(), n);
        for (int i = 0; i < n; ++i) arg[i] = nb.x[i] * std::sqrt(m);
        K.norm_pdf(arg.data(), dens.data(), n);
        for (int i = 0; i < n; ++i) dens[i] *= std::sqrt(m) * nb.w[i];
        return K.dot(cdf.data(), dens.data(), n);
    });
    return p1 + p2;
}

double final_reject_spend_at(const NormalDesign& nd, const Thresholds& t, int budget, int inner) {
    const auto& K = simd::active();
    const double m = static_cast<double>(nd.m);
    const double Mn = static_cast<double>(nd.M);
    const double f1 = nd.t1 - std::sqrt(2.0 * t.b_tilde / m);
    const double r1 = std::sqrt(2.0 * t.b / m);
    if (!(f1 < r1)) return 0.0;
    const double croot = std::sqrt(2.0 * t.c * Mn);

    NodeBatch nb, ib;
    std::vector<double> arg, cdf, dens;
    return integrate(nd, f1, r1, budget, [&](double a, double bb, int n) {
        std::int64_t k = nd.k_of(0.5 * (a + bb));
        nb.build(a, bb, n);
        double piece = 0.0;
        if (k >= nd.M || k <= nd.m) {
            // no middle analysis: S_M | S_m straight away
            arg.resize(n); cdf.resize(n); dens.resize(n);
            double sd = std::sqrt(Mn - m);
            for (int i = 0; i < n; ++i) arg[i] = (m * nb.x[i] - croot) / sd;
            K.norm_cdf(arg.data(), cdf.data(), n);
            for (int i = 0; i < n; ++i) arg[i] = nb.x[i] * std::sqrt(m);
            K.norm_pdf(arg.data(), dens.data(), n);
            for (int i = 0; i < n; ++i) dens[i] *= std::sqrt(m) * nb.w[i];
            return K.dot(cdf.data(), dens.data(), n);
        }
        double kk = static_cast<double>(k);
        double lo2 = kk * nd.t1 - std::sqrt(2.0 * t.b_tilde * kk);
        double hi2 = std::sqrt(2.0 * t.b * kk);
        if (!(hi2 > lo2)) return 0.0;
        ib.build(lo2, hi2, inner);
        double sd2 = std::sqrt(kk - m), sdM = std::sqrt(Mn - kk);
        std::vector<double> tail(inner);
        arg.resize(inner);
        for (int j = 0; j < inner; ++j) arg[j] = (ib.x[j] - croot) / sdM;
        K.norm_cdf(arg.data(), tail.data(), inner);
        cdf.resize(inner); dens.resize(inner);
        for (int i = 0; i < n; ++i) {
            double mx = m * nb.x[i];
            for (int j = 0; j < inner; ++j) arg[j] = (ib.x[j] - mx) / sd2;
            K.norm_pdf(arg.data(), dens.data(), inner);
            for (int j = 0; j < inner; ++j) dens[j] *= ib.w[j] / sd2;
            double inner_val = K.dot(tail.data(), dens.data(), inner);
            piece += inner_val * num::norm_pdf(nb.x[i] * std::sqrt(m)) * std::sqrt(m) * nb.w[i];
        }
        return piece;
    });
}

// Evaluate with a doubling node budget until the change drops under tol.
template <class F>
double refined(const QuadratureSettings& qs, int* nodes_used, F&& eval) {
    int budget = qs.outer_nodes, inner = qs.inner_nodes;
    double v = eval(budget, inner);
    for (int r = 0; r < qs.max_doublings; ++r) {
        double v2 = eval(budget * 2, inner * 2);
        if (std::fabs(v2 - v) < qs.refine_tol) {
            if (nodes_used) *nodes_used = std::max(*nodes_used, budget * 2);
            return v2;
        }
        v = v2;
        budget *= 2;
        inner *= 2;
    }
    if (nodes_used) *nodes_used = std::max(*nodes_used, budget);
    return v;
}

}  // namespace

double futility_spend(const DesignParams& d, double b_tilde, const QuadratureSettings& qs) {
    NormalDesign nd = standardized(d);
    return refined(qs, nullptr, [&](int b, int in) { return futility_spend_at(nd, b_tilde, b, in); });
}

double early_reject_spend(const DesignParams& d, double b_tilde, double b,
                          const QuadratureSettings& qs) {
    if (!(b > b_tilde)) throw std::invalid_argument("early_reject_spend: need b > b_tilde");
    NormalDesign nd = standardized(d);
    return refined(qs, nullptr,
                   [&](int bu, int in) { return early_reject_spend_at(nd, b_tilde, b, bu, in); });
}

double final_reject_spend(const DesignParams& d, const Thresholds& t, const QuadratureSettings& qs) {
    NormalDesign nd = standardized(d);
    return refined(qs, nullptr, [&](int b, int in) { return final_reject_spend_at(nd, t, b, in); });
}

CalibrationReport calibrate_quadrature(const DesignParams& d, const QuadratureSettings& qs) {
    NormalDesign nd = standardized(d);
    const double t7 = d.eps_tilde * d.alpha_tilde;
    const double t8 = d.eps * d.alpha;
    const double t9 = (1.0 - d.eps) * d.alpha;
    int nodes_used = qs.outer_nodes;

    auto solve = [&](auto&& lhs, double target) {
        return num::brent_root([&](double x) { return lhs(x) - target; }, 1e-6, 50.0, 1e-4);
    };

    CalibrationReport rep;
    rep.method = CalibrationMethod::Quadrature;
    double bt = solve([&](double x) {
        return refined(qs, &nodes_used, [&](int b, int in) { return futility_spend_at(nd, x, b, in); });
    }, t7);
    double b = solve([&](double x) {
        return refined(qs, &nodes_used,
                       [&](int bu, int in) { return early_reject_spend_at(nd, bt, x, bu, in); });
    }, t8);
    double c = solve([&](double x) {
        Thresholds tt{b, bt, x};
        return refined(qs, &nodes_used,
                       [&](int bu, int in) { return final_reject_spend_at(nd, tt, bu, in); });
    }, t9);

    rep.thresholds = {b, bt, c};
    rep.thresholds.validate();
    rep.achieved[0] = futility_spend_at(nd, bt, qs.outer_nodes, qs.inner_nodes);
    rep.achieved[1] = early_reject_spend_at(nd, bt, b, qs.outer_nodes, qs.inner_nodes);
    rep.achieved[2] = final_reject_spend_at(nd, rep.thresholds, qs.outer_nodes, qs.inner_nodes);
    rep.reps_or_nodes = nodes_used;
    return rep;
}

}  // namespace adapt
