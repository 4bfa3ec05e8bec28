#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "catalog.hpp"
#include "geodesy.hpp"
#include "metric.hpp"
#include "random.hpp"

namespace lieatlas {

// ---------------------------------------------------------------------------
// Hyperbolic plane in horospherical coordinates: ds^2 = e^{-2z} dx^2 + dz^2

struct H2Point {
    double x = 0.0;
    double z = 0.0;
};

inline double h2_distance(const H2Point& a, const H2Point& b) {
    double dx = a.x - b.x;
    double sh = std::sinh(0.5 * (a.z - b.z));
    double q = 0.25 * dx * dx * std::exp(-(a.z + b.z)) + sh * sh;
    return 2.0 * std::asinh(std::sqrt(q));
}

namespace detail {

inline double checked_lambda(const GroupSpec& s) {
    GroupSpec c = normalize_spec(s);
    if (c.family != Family::Dlambda || !(c.lambda >= -1.0 && c.lambda < 0.0))
        throw NotApplicable("the H2 x H2 embedding needs D_lambda with lambda in [-1, 0)");
    return c.lambda;
}

inline void check_lambda(double lambda) {
    if (!(lambda >= -1.0 && lambda < 0.0)) throw NotApplicable("lambda must lie in [-1, 0)");
}

}  // namespace detail

inline std::pair<H2Point, H2Point> qi_embed_H2xH2(const GroupSpec& s, const GroupElement& p) {
    detail::checked_lambda(s);
    detail::check_element(s, chart(s), p.coords);
    return {{p[0], p[2]}, {p[1], p[2]}};
}

// Distances in the two factors; the second is the plane of slope lambda,
// a homothetic copy of H^2 reached through (y, z) -> (|l| y, l z).
inline std::pair<double, double> factor_distances(double lambda, const GroupElement& p, const GroupElement& q) {
    detail::check_lambda(lambda);
    double al = std::abs(lambda);
    double d1 = h2_distance({p[0], p[2]}, {q[0], q[2]});
    double d2 = h2_distance({al * p[1], lambda * p[2]}, {al * q[1], lambda * q[2]}) / al;
    return {d1, d2};
}

inline double embedding_distance(double lambda, const GroupElement& p, const GroupElement& q) {
    auto [a, b] = factor_distances(lambda, p, q);
    return std::max(a, b);
}

// ---------------------------------------------------------------------------
// Quasi-geodesics gamma_a, gamma_b

namespace detail {

struct H2Sample {
    H2Point p;
    double s;  // arclength from the start of the leg
};

inline double log_cosh(double x) {
    double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Closed-form geodesic segment: a vertical line, or a half-circle
// u = c + R tanh(t), v = R / cosh(t), on which t is arclength.
inline std::vector<H2Sample> h2_segment(const H2Point& a, const H2Point& b, int n) {
    std::vector<H2Sample> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    if (a.x == b.x) {
        for (int i = 0; i <= n; ++i) {
            double f = static_cast<double>(i) / n;
            double z = a.z + f * (b.z - a.z);
            out.push_back({{a.x, z}, std::abs(z - a.z)});
        }
        return out;
    }
    double va = std::exp(a.z), vb = std::exp(b.z);
    double c = 0.5 * (b.x + a.x) + 0.5 * (vb - va) * (vb + va) / (b.x - a.x);
    double R = std::hypot(a.x - c, va);
    double ta = std::asinh((a.x - c) / va), tb = std::asinh((b.x - c) / vb);
    for (int i = 0; i <= n; ++i) {
        double t = ta + (tb - ta) * static_cast<double>(i) / n;
        H2Point p{c + R * std::tanh(t), std::log(R) - log_cosh(t)};
        if (i == 0) p = a;
        if (i == n) p = b;
        out.push_back({p, std::abs(t - ta)});
    }
    return out;
}

// Leg inside a plane y = const (axis 0) or x = const (axis 1).
inline void append_leg(Curve& c, double lambda, const GroupElement& from, const GroupElement& to, int axis, int n) {
    double al = std::abs(lambda);
    double scale = axis == 0 ? 1.0 : 1.0 / al;
    H2Point a, b;
    if (axis == 0) {
        a = {from[0], from[2]};
        b = {to[0], to[2]};
    } else {
        a = {al * from[1], lambda * from[2]};
        b = {al * to[1], lambda * to[2]};
    }
    auto seg = h2_segment(a, b, n);
    double t0 = c.times.empty() ? 0.0 : c.times.back();
    for (std::size_t i = c.samples.empty() ? 0 : 1; i < seg.size(); ++i) {
        const auto& q = seg[i];
        GroupElement g = from;
        if (axis == 0) {
            g.coords[0] = q.p.x;
            g.coords[2] = q.p.z;
        } else {
            g.coords[1] = q.p.x / al;
            g.coords[2] = q.p.z / lambda;
        }
        c.samples.push_back(g);
        c.times.push_back(t0 + scale * q.s);
    }
}

}  // namespace detail

// gamma_a runs through (x2, y1, z2), gamma_b through (x1, y2, z2).
inline std::pair<Curve, Curve> quasi_geodesic_pair(double lambda, const GroupElement& p1, const GroupElement& p2,
                                                   int samples_per_leg = 64) {
    detail::check_lambda(lambda);
    GroupSpec s = groups::D(lambda);
    Chart ch = chart(s);
    detail::check_element(s, ch, p1.coords);
    detail::check_element(s, ch, p2.coords);
    if (samples_per_leg < 2) throw BadElement("need at least two samples per leg");
    Curve a, b;
    a.spec = b.spec = s;
    if (p1.coords == p2.coords) {
        a.samples = b.samples = {p1, p1};
        a.times = b.times = {0.0, 0.0};
        return {a, b};
    }
    if (p1[0] == p2[0] || p1[1] == p2[1]) throw DegenerateEndpoints("endpoints must differ in both x and y");
    GroupElement ca{p2[0], p1[1], p2[2]}, cb{p1[0], p2[1], p2[2]};
    detail::append_leg(a, lambda, p1, ca, 0, samples_per_leg);
    detail::append_leg(a, lambda, ca, p2, 1, samples_per_leg);
    detail::append_leg(b, lambda, p1, cb, 1, samples_per_leg);
    detail::append_leg(b, lambda, cb, p2, 0, samples_per_leg);
    return {a, b};
}

// ---------------------------------------------------------------------------
// Hausdorff distance between sampled curves

inline double hausdorff_distance(const DistanceEngine& eng, const Curve& c1, const Curve& c2) {
    if (c1.samples.empty() || c2.samples.empty()) throw BadElement("empty curve");
    auto directed = [&](const Curve& A, const Curve& B, double h) {
        std::vector<std::pair<double, std::size_t>> order(B.samples.size());
        for (const GroupElement& p : A.samples) {
            for (std::size_t j = 0; j < B.samples.size(); ++j)
                order[j] = {eng.lower_bound(p, B.samples[j]), j};
            std::sort(order.begin(), order.end());
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [lb, j] : order) {
                // Nothing left can beat best, or p already cannot raise h.
                if (lb >= best || best <= h) break;
                const GroupElement& q = B.samples[j];
                double d = p.coords == q.coords ? 0.0 : std::min(eng.upper_bound(p, q), eng.distance(p, q));
                best = std::min(best, d);
            }
            h = std::max(h, best);
        }
        return h;
    };
    double h = directed(c1, c2, 0.0);
    return directed(c2, c1, h);
}

inline DistanceBudget hausdorff_budget() {
    DistanceBudget b;
    b.restarts = 4;
    b.max_iterations = 25;
    b.tolerance = 1e-9;
    b.both_directions = false;
    return b;
}

inline double hausdorff_distance(const GroupSpec& s, const FrameMetric& m, const Curve& c1, const Curve& c2,
                                 const DistanceBudget& b = hausdorff_budget()) {
    return hausdorff_distance(DistanceEngine(s, m, b), c1, c2);
}

// ---------------------------------------------------------------------------
// Quasi-geodesic constants

struct QIConstants {
    double L = 1.0;
    double C = 0.0;
};

struct QuasiGeodesicFit {
    QIConstants constants;
    std::size_t pairs = 0;
    // distance_estimate / comparison distance on a subsample of pairs
    double cross_min = 0.0, cross_max = 0.0;
};

inline const std::vector<double>& qi_l_grid() {
    static const std::vector<double> g{1.0, 1.1, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0};
    return g;
}

// Smallest C for each L on the grid given (parameter gap, distance) pairs;
// returns the grid point minimizing L + C.
inline QIConstants fit_qi_constants(const std::vector<std::pair<double, double>>& gaps) {
    QIConstants best{0.0, std::numeric_limits<double>::infinity()};
    for (double L : qi_l_grid()) {
        double C = 0.0;
        for (const auto& [dt, d] : gaps) C = std::max({C, dt / L - d, d - L * dt});
        if (L + C < best.L + best.C) best = {L, C};
    }
    return best;
}

inline QuasiGeodesicFit quasi_geodesic_constants(double lambda, const Curve& curve, int cross_checks = 12,
                                                 std::uint64_t seed = 0) {
    detail::check_lambda(lambda);
    if (curve.samples.size() < 2 || !(curve.times.back() > curve.times.front()))
        throw DegenerateEndpoints("constant curve has no quasi-geodesic constants");
    const std::size_t n = curve.samples.size();
    std::vector<std::pair<double, double>> gaps;
    gaps.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            gaps.emplace_back(curve.times[j] - curve.times[i],
                              embedding_distance(lambda, curve.samples[i], curve.samples[j]));
    QuasiGeodesicFit fit;
    fit.constants = fit_qi_constants(gaps);
    fit.pairs = gaps.size();
    if (cross_checks > 0) {
        GroupSpec s = groups::D(lambda);
        DistanceEngine eng(s, default_metric(s), hausdorff_budget());
        fit.cross_min = std::numeric_limits<double>::infinity();
        fit.cross_max = 0.0;
        for (int k = 0; k < cross_checks; ++k) {
            CounterRng rng = make_rng(seed, 11, static_cast<std::uint64_t>(k));
            auto i = static_cast<std::size_t>(rng.uniform() * n), j = static_cast<std::size_t>(rng.uniform() * n);
            i = std::min(i, n - 1);
            j = std::min(j, n - 1);
            if (i == j) continue;
            double de = embedding_distance(lambda, curve.samples[i], curve.samples[j]);
            if (de <= 0.0) continue;
            double d = eng.distance(curve.samples[i], curve.samples[j]);
            fit.cross_min = std::min(fit.cross_min, d / de);
            fit.cross_max = std::max(fit.cross_max, d / de);
        }
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Gromov hyperbolicity by the four-point condition

struct HyperbolicityOptions {
    int refine_rounds = 24;  // hill-climbing steps on the worst quadruples
    int refine_keep = 3;
    DistanceBudget budget = [] {
        DistanceBudget b;
        b.restarts = 3;
        b.max_iterations = 25;
        b.tolerance = 1e-9;
        b.both_directions = false;
        return b;
    }();
};

struct HyperbolicityReport {
    double scale = 0.0;
    double delta_estimate = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    int distance_errors = 0;
};

inline double four_point_defect(const std::array<double, 6>& d) {
    // d = {xy, xz, xw, yz, yw, zw}
    std::array<double, 3> s{d[0] + d[5], d[1] + d[4], d[2] + d[3]};
    std::sort(s.begin(), s.end());
    return 0.5 * (s[2] - s[1]);
}

inline HyperbolicityReport hyperbolicity_delta(const GroupSpec& s, const FrameMetric& m, double scale, int samples,
                                               std::uint64_t seed, const HyperbolicityOptions& opt = {}) {
    if (!(scale > 0.0)) throw BadElement("scale must be positive");
    if (samples < 1) throw InsufficientSamples("need at least one quadruple");
    DistanceBudget b = opt.budget;
    b.seed = seed;
    DistanceEngine eng(s, m, b);
    const Geometry& G = eng.geometry();
    HyperbolicityReport rep;
    rep.scale = scale;
    rep.samples = samples;
    rep.seed = seed;

    auto point = [&](const Vec& xi) {
        int N = detail::steps_for(G, b, q_norm(G, xi));
        return GroupElement(normalize_vec(s, G.chart, integrate_flow(G, G.identity, xi, N).x));
    };
    auto dist = [&](const GroupElement& p, const GroupElement& q) {
        try {
            return eng.distance(p, q);
        } catch (const NoPathFound&) {
            ++rep.distance_errors;
            return eng.upper_bound(p, q);
        }
    };
    auto defect = [&](const std::array<Vec, 4>& xs) {
        std::array<GroupElement, 4> p;
        for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = point(xs[static_cast<std::size_t>(i)]);
        std::array<double, 6> d{dist(p[0], p[1]), dist(p[0], p[2]), dist(p[0], p[3]),
                                dist(p[1], p[2]), dist(p[1], p[3]), dist(p[2], p[3])};
        return four_point_defect(d);
    };
    auto clamp_ball = [&](Vec xi) {
        double n = q_norm(G, xi);
        if (n > scale) xi *= scale / n;
        return xi;
    };

    std::vector<std::pair<double, std::array<Vec, 4>>> found;
    for (int k = 0; k < samples; ++k) {
        CounterRng rng = make_rng(seed, 21, static_cast<std::uint64_t>(k));
        std::array<Vec, 4> xs;
        for (auto& xi : xs) {
            Vec u(G.n);
            for (int i = 0; i < G.n; ++i) u[i] = rng.normal();
            u /= u.norm();
            xi = (scale * rng.uniform(0.25, 1.0)) * (G.Qchol_inv_t * u);
        }
        found.emplace_back(defect(xs), xs);
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& c) { return a.first > c.first; });
    double best = found.front().first;
    int keep = std::min<int>(opt.refine_keep, static_cast<int>(found.size()));
    for (int q = 0; q < keep; ++q) {
        auto [cur, xs] = found[static_cast<std::size_t>(q)];
        for (int it = 0; it < opt.refine_rounds; ++it) {
            CounterRng rng = make_rng(seed, 22 + static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(it));
            double step = 0.15 * scale * (1.0 - static_cast<double>(it) / opt.refine_rounds) + 0.02 * scale;
            auto trial = xs;
            auto& xi = trial[static_cast<std::size_t>(it % 4)];
            for (int i = 0; i < G.n; ++i) xi[i] += step * rng.normal() / std::sqrt(static_cast<double>(G.n));
            xi = clamp_ball(xi);
            double v = defect(trial);
            if (v > cur) {
                cur = v;
                xs = trial;
            }
        }
        best = std::max(best, cur);
    }
    rep.delta_estimate = best;
    return rep;
}

}  // namespace lieatlas
