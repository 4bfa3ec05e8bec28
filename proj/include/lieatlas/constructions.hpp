#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "geodesy.hpp"
#include "invariants.hpp"
#include "metric.hpp"
#include "random.hpp"

namespace lieatlas {

struct VerificationReport {
    std::string name;
    bool pass = false;
    double max_deviation = 0.0;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
};

namespace detail {

inline GroupElement random_se2(CounterRng& rng, double theta_max) {
    return {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), rng.uniform(0.0, theta_max)};
}

inline void check_samples(int samples) {
    if (samples < 1) throw InsufficientSamples("need at least one sample");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Euclidean distance on the universal cover of SE(2)

inline double euclidean_distance(const GroupElement& p, const GroupElement& q) { return (p.coords - q.coords).norm(); }

inline VerificationReport verify_se2_left_invariance(int samples = 1000, std::uint64_t seed = 0) {
    detail::check_samples(samples);
    GroupSpec s = groups::SE2tilde();
    VerificationReport r{"se2_left_invariance", false, 0.0, {{"samples", samples}}, seed};
    for (int i = 0; i < samples; ++i) {
        CounterRng rng = make_rng(seed, 21, static_cast<std::uint64_t>(i));
        GroupElement g = detail::random_se2(rng, 20.0), p = detail::random_se2(rng, 20.0),
                     q = detail::random_se2(rng, 20.0);
        // Shift the angle to both signs so the covering direction gets exercised.
        g[2] -= 10.0;
        double dev = std::abs(euclidean_distance(multiply(s, g, p), multiply(s, g, q)) - euclidean_distance(p, q));
        r.max_deviation = std::max(r.max_deviation, dev);
    }
    r.pass = r.max_deviation < 1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// SE(2)_k as a flat cylinder R^2 x (R/Z)

inline void check_k(int k) {
    if (k < 1) throw InvalidSpec("k must be a positive integer");
}

inline GroupElement cylinder_isometry(int k, const GroupElement& p) {
    check_k(k);
    GroupSpec cyl = groups::R2xT1();
    detail::check_element(cyl, chart(cyl), p.coords);
    double theta = wrap_period(p[2], 1.0);
    GroupSpec s = groups::SE2k(k);
    Vec c(3);
    c << p[0], p[1], 2.0 * std::numbers::pi * k * theta;
    return GroupElement(normalize_vec(s, chart(s), c));
}

// Left-invariant distance on SE(2)_k; the angular part is rescaled to a
// circle of circumference 1.
inline double se2k_distance(int k, const GroupElement& p, const GroupElement& q) {
    check_k(k);
    double period = 2.0 * std::numbers::pi * k;
    double dth = std::abs(wrap_symmetric(p[2] - q[2], period)) / period;
    return std::sqrt(std::pow(p[0] - q[0], 2) + std::pow(p[1] - q[1], 2) + dth * dth);
}

inline double cylinder_distance(const GroupElement& p, const GroupElement& q) {
    double dth = wrap_symmetric(p[2] - q[2], 1.0);
    return std::sqrt(std::pow(p[0] - q[0], 2) + std::pow(p[1] - q[1], 2) + dth * dth);
}

inline VerificationReport verify_cylinder_isometry(int k, int samples = 1000, std::uint64_t seed = 0) {
    check_k(k);
    detail::check_samples(samples);
    VerificationReport r{"cylinder_isometry", false, 0.0, {{"k", k}, {"samples", samples}}, seed};
    for (int i = 0; i < samples; ++i) {
        CounterRng rng = make_rng(seed, 22, static_cast<std::uint64_t>(i));
        GroupElement p{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), rng.uniform()};
        GroupElement q{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), rng.uniform()};
        double dev = std::abs(se2k_distance(k, cylinder_isometry(k, p), cylinder_isometry(k, q)) -
                              cylinder_distance(p, q));
        r.max_deviation = std::max(r.max_deviation, dev);
    }
    r.pass = r.max_deviation < 1e-12;
    return r;
}

inline VerificationReport verify_eq4_left_invariance(int k, int samples = 1000, std::uint64_t seed = 0) {
    check_k(k);
    detail::check_samples(samples);
    GroupSpec s = groups::SE2k(k);
    double period = 2.0 * std::numbers::pi * k;
    VerificationReport r{"se2k_left_invariance", false, 0.0, {{"k", k}, {"samples", samples}}, seed};
    for (int i = 0; i < samples; ++i) {
        CounterRng rng = make_rng(seed, 23, static_cast<std::uint64_t>(i));
        GroupElement g = detail::random_se2(rng, period), p = detail::random_se2(rng, period),
                     q = detail::random_se2(rng, period);
        double dev = std::abs(se2k_distance(k, multiply(s, g, p), multiply(s, g, q)) - se2k_distance(k, p, q));
        r.max_deviation = std::max(r.max_deviation, dev);
    }
    r.pass = r.max_deviation < 1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// Coverings are local isometries

inline VerificationReport verify_covering_local_isometry(const GroupSpec& total, const GroupSpec& base,
                                                         const FrameMetric& m, int samples = 200,
                                                         std::uint64_t seed = 0) {
    if (!is_covering_pair(total, base))
        throw NotACovering(to_string(total) + " -> " + to_string(base) + " is not a supported covering");
    detail::check_samples(samples);
    validate_metric(total, m);
    VerificationReport r{"covering_local_isometry", false, 0.0, {{"samples", samples}}, seed};
    const Chart ct = chart(total), cb = chart(base);
    const bool quat = kind_of(total) == Kind::Quaternion;
    const double h = 1e-4;
    for (int i = 0; i < samples; ++i) {
        CounterRng rng = make_rng(seed, 24, static_cast<std::uint64_t>(i));
        Vec v(algebra_dim(total));
        for (int j = 0; j < v.size(); ++j) v[j] = rng.normal();
        double lt, lb;
        if (quat) {
            Vec q(4);
            for (int j = 0; j < 4; ++j) q[j] = rng.normal();
            q.normalize();
            GroupElement p(q);
            GroupElement p2(detail::quat_mul(q, detail::quat_exp(h * v)));
            GroupElement bp = covering_projection(total, base, p), bp2 = covering_projection(total, base, p2);
            Vec w = detail::quat_log(detail::quat_mul(detail::quat_conj(bp.coords), bp2.coords),
                                     base.family == Family::SO3) / h;
            lt = std::sqrt(v.dot(m.Q * v));
            lb = std::sqrt(w.dot(m.Q * w));
        } else {
            Vec x(ct.dim);
            for (int j = 0; j < ct.dim; ++j) x[j] = rng.uniform(-5.0, 5.0);
            if (total.family == Family::SE2tilde) x[2] = rng.uniform(-40.0, 40.0);
            GroupElement p(x);
            GroupElement bp = covering_projection(total, base, p);
            GroupElement bp2 = covering_projection(total, base, GroupElement(Vec(x + h * v)));
            Vec w = wrapped_difference(cb, bp2.coords, bp.coords) / h;
            lt = std::sqrt(v.dot(local_metric(total, m.Q, x) * v));
            lb = std::sqrt(w.dot(local_metric(base, m.Q, bp.coords) * w));
        }
        r.max_deviation = std::max(r.max_deviation, std::abs(lt - lb) / lt);
    }
    r.pass = r.max_deviation < 1e-8;
    return r;
}

// ---------------------------------------------------------------------------
// Identity maps as quasi-isometries

struct QIHomeoReport {
    double box = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    QIConstants constants;
    double max_ratio = 0.0;  // largest d_target / d_source over the pairs
};

namespace detail {

// Half the pairs are spread over the box, the other half are close pairs.
template <class Dsource, class Dtarget, class Draw>
QIHomeoReport identity_map_fit(double box, int samples, std::uint64_t seed, std::uint64_t stream, Draw draw,
                               Dsource dsrc, Dtarget dtgt) {
    if (!(box > 0.0)) throw BadElement("box must be positive");
    if (samples < 2) throw InsufficientSamples("need at least two pairs");
    QIHomeoReport r{box, samples, seed, {}, 0.0};
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < samples; ++i) {
        CounterRng rng = make_rng(seed, stream, static_cast<std::uint64_t>(i));
        GroupElement p = draw(rng, box), q = draw(rng, box);
        if (i % 2 == 1) {
            double eps = std::pow(10.0, rng.uniform(-3.0, 0.0));
            for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = p[j] + eps * (q[j] - p[j]) / box;
        }
        double a = dsrc(p, q), b = dtgt(p, q);
        pairs.emplace_back(a, b);
        if (a > 0.0) r.max_ratio = std::max(r.max_ratio, b / a);
    }
    r.constants = fit_qi_constants(pairs);
    return r;
}

}  // namespace detail

// Identity of R^2 x T^1 from N3* (standard metric) to the flat product.
inline QIHomeoReport n3star_qi_homeo(int samples, double box, std::uint64_t seed = 0) {
    GroupSpec s = groups::N3star();
    DistanceEngine eng(s, default_metric(s));
    auto draw = [](CounterRng& rng, double b) {
        return GroupElement{rng.uniform(-b, b), rng.uniform(-b, b), rng.uniform()};
    };
    auto dn = [&](const GroupElement& p, const GroupElement& q) { return eng.distance(p, q); };
    auto dflat = [](const GroupElement& p, const GroupElement& q) { return cylinder_distance(p, q); };
    return detail::identity_map_fit(box, samples, seed, 25, draw, dn, dflat);
}

// Same estimator on the identity R^3 -> N3, which is not a quasi-isometry.
inline QIHomeoReport r3_n3_identity_fit(int samples, double box, std::uint64_t seed = 0) {
    GroupSpec s = groups::N3();
    DistanceEngine eng(s, default_metric(s));
    auto draw = [](CounterRng& rng, double b) {
        return GroupElement{rng.uniform(-b, b), rng.uniform(-b, b), rng.uniform(-b, b)};
    };
    auto de = [](const GroupElement& p, const GroupElement& q) { return euclidean_distance(p, q); };
    auto dn = [&](const GroupElement& p, const GroupElement& q) { return eng.distance(p, q); };
    return detail::identity_map_fit(box, samples, seed, 26, draw, de, dn);
}

// ---------------------------------------------------------------------------
// Divergence of the two quasi-geodesics in D_lambda

struct DivergenceRow {
    double separation = 0.0;
    double hausdorff = 0.0;
    QIConstants constants;
    double cross_min = 0.0, cross_max = 0.0;
};

inline std::vector<DivergenceRow> divergence_experiment(double lambda, const std::vector<double>& separations,
                                                        std::uint64_t seed = 0, int samples_per_leg = 32) {
    detail::check_lambda(lambda);
    GroupSpec s = groups::D(lambda);
    DistanceEngine eng(s, default_metric(s), hausdorff_budget());
    std::vector<DivergenceRow> rows;
    for (std::size_t i = 0; i < separations.size(); ++i) {
        double sep = separations[i];
        if (!(sep > 0.0)) throw DegenerateEndpoints("separations must be positive");
        auto [ga, gb] = quasi_geodesic_pair(lambda, {0.0, 0.0, 0.0}, {sep, sep, 0.0}, samples_per_leg);
        QuasiGeodesicFit fit = quasi_geodesic_constants(lambda, ga, 12, derive_seed(seed, 27, i));
        rows.push_back({sep, hausdorff_distance(eng, ga, gb), fit.constants, fit.cross_min, fit.cross_max});
    }
    return rows;
}

}  // namespace lieatlas
