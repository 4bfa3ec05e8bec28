#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "catalog.hpp"

namespace lieatlas {

struct ClassLabel {
    int id = 0;
    std::optional<double> param;

    bool operator==(const ClassLabel& o) const {
        if (id != o.id || param.has_value() != o.param.has_value()) return false;
        return !param || same_lambda(*param, *o.param);
    }
};

inline std::string to_string(const ClassLabel& c) {
    std::string s = "(" + std::to_string(c.id);
    if (c.param) s += "_" + detail::fmt_double(*c.param);
    return s + ")";
}

enum class Level { NotQI = 0, QI = 1, QIHomeomorphic = 2, BiLipschitz = 3, MadeIsometric = 4, Isomorphic = 5 };

inline std::string to_string(Level l) {
    switch (l) {
        case Level::NotQI: return "NotQI";
        case Level::QI: return "QI";
        case Level::QIHomeomorphic: return "QIHomeomorphic";
        case Level::BiLipschitz: return "BiLipschitz";
        case Level::MadeIsometric: return "MadeIsometric";
        case Level::Isomorphic: return "Isomorphic";
    }
    return "?";
}

struct RelationVerdict {
    Level level = Level::NotQI;
    std::string citation;
};

struct GrowthType {
    bool exponential = false;
    int degree = 0;  // meaningful when !exponential

    bool operator==(const GrowthType& o) const {
        return exponential == o.exponential && (exponential || degree == o.degree);
    }
};

inline std::string to_string(const GrowthType& g) {
    return g.exponential ? "exponential" : "polynomial(" + std::to_string(g.degree) + ")";
}

// ---------------------------------------------------------------------------
// Reduction of R^2 x|_A R to a named family

namespace detail {

constexpr double kEigenThreshold = 1e-9;

struct Spectrum {
    double tr, det, disc;
    bool complex;
    bool repeated;
    double re1, re2;  // real parts, |re1| >= |re2|
    double im;
};

inline Spectrum spectrum(const Mat2& A) {
    Spectrum s{};
    s.tr = A.trace();
    s.det = A.determinant();
    s.disc = s.tr * s.tr - 4.0 * s.det;
    s.repeated = std::abs(s.disc) < kEigenThreshold;
    s.complex = !s.repeated && s.disc < 0.0;
    if (s.repeated) {
        s.re1 = s.re2 = 0.5 * s.tr;
        s.im = 0.0;
    } else if (s.complex) {
        s.re1 = s.re2 = 0.5 * s.tr;
        s.im = 0.5 * std::sqrt(-s.disc);
    } else {
        double q = 0.5 * std::sqrt(s.disc);
        double a = 0.5 * s.tr + q, b = 0.5 * s.tr - q;
        if (std::abs(a) < std::abs(b)) std::swap(a, b);
        s.re1 = a;
        s.re2 = b;
        s.im = 0.0;
    }
    return s;
}

inline Mat2 unit_scaled(const Mat2& A) {
    double m = A.cwiseAbs().maxCoeff();
    return m > 0 ? Mat2(A / m) : A;
}

}  // namespace detail

// Named family isomorphic to R^2 x|_A R (A and sA, s != 0, and conjugates of A
// give isomorphic groups).
inline GroupSpec reduce_semidirect(const Mat2& A0) {
    if (!A0.allFinite()) throw Unclassifiable("non-finite matrix");
    if (A0.cwiseAbs().maxCoeff() == 0.0) return groups::R(3);
    Mat2 A = detail::unit_scaled(A0);
    detail::Spectrum sp = detail::spectrum(A);
    using detail::kEigenThreshold;
    if (sp.complex) {
        if (std::abs(sp.re1) < kEigenThreshold) return groups::SE2tilde();
        return groups::C(std::abs(sp.re1) / sp.im);
    }
    if (sp.repeated) {
        double mu = sp.re1;
        if (std::abs(mu) < kEigenThreshold) return groups::N3();
        Mat2 N = A - mu * Mat2::Identity();
        if (N.cwiseAbs().maxCoeff() < kEigenThreshold) return groups::D(1.0);
        return groups::J();
    }
    if (std::abs(sp.re2) < kEigenThreshold) return groups::AffRxR();
    double l = sp.re2 / sp.re1;
    if (l >= 1.0) return groups::D(1.0);
    if (l < -1.0) l = -1.0;
    return groups::D(l);
}

// Isomorphism-class representative.
inline GroupSpec canonical(const GroupSpec& s) {
    GroupSpec n = normalize_spec(s);
    if (n.family == Family::SemidirectA) return reduce_semidirect(n.A);
    return n;
}

inline bool isomorphic(const GroupSpec& a, const GroupSpec& b) { return same_spec(canonical(a), canonical(b)); }

inline ClassLabel classify(const GroupSpec& s0) {
    GroupSpec s = canonical(s0);
    switch (s.family) {
        case Family::Tn: case Family::SU2: case Family::SO3: return {1, {}};
        case Family::Rn:
            return {s.n == 1 ? 2 : (s.n == 2 ? 3 : 4), {}};
        case Family::RxT1: case Family::RxT2: return {2, {}};
        case Family::R2xT1: case Family::N3star: case Family::SE2k: return {3, {}};
        case Family::SE2tilde: return {4, {}};
        case Family::N3: return {5, {}};
        case Family::SL2tilde: case Family::AffRxR: return {6, {}};
        case Family::AffR: case Family::AffRxT1: case Family::PSL2k: return {8, {}};
        case Family::J: return {9, {}};
        case Family::Clambda: return {10, {}};
        case Family::Dlambda:
            if (s.lambda < 0) return {7, s.lambda};
            if (s.lambda == 1.0) return {10, {}};
            return {11, s.lambda};
        case Family::SemidirectA: break;
    }
    throw Unclassifiable("no table row for " + to_string(s0));
}

inline GrowthType growth_type_for_class(int id) {
    if (id >= 1 && id <= 5) return {false, id - 1};
    return {true, 0};
}

inline GrowthType growth_type_algebraic(const GroupSpec& s) { return growth_type_for_class(classify(s).id); }

struct ClassMetadata {
    GrowthType growth;
    bool hyperbolic = false;
    std::string boundary;
};

// Bounded spaces (1) and quasi-lines (2) are hyperbolic for trivial reasons.
inline ClassMetadata class_metadata(int id) {
    ClassMetadata m;
    m.growth = growth_type_for_class(id);
    m.hyperbolic = id == 1 || id == 2 || id >= 8;
    m.boundary = id == 8 ? "S1" : (id >= 9 ? "S2" : "n/a");
    return m;
}

// ---------------------------------------------------------------------------
// Relation facts

struct RelationFact {
    Level level;
    std::string citation;
    std::function<bool(const GroupSpec&)> left, right;
    bool distinct = false;  // the two sides must be non-isomorphic members
};

namespace detail {

inline std::function<bool(const GroupSpec&)> fam(Family f) {
    return [f](const GroupSpec& s) { return s.family == f; };
}

inline std::function<bool(const GroupSpec&)> is_rn(int n) {
    return [n](const GroupSpec& s) { return s.family == Family::Rn && s.n == n; };
}

inline std::function<bool(const GroupSpec&)> is_d1() {
    return [](const GroupSpec& s) { return s.family == Family::Dlambda && s.lambda == 1.0; };
}

inline std::function<bool(const GroupSpec&)> any_of(std::vector<std::function<bool(const GroupSpec&)>> fs) {
    return [fs](const GroupSpec& s) {
        for (const auto& f : fs)
            if (f(s)) return true;
        return false;
    };
}

}  // namespace detail

inline const std::vector<RelationFact>& relation_facts() {
    using detail::fam;
    using detail::is_rn;
    static const std::vector<RelationFact> facts = [] {
        auto compact = detail::any_of({fam(Family::Tn), fam(Family::SU2), fam(Family::SO3)});
        auto line_like = detail::any_of({is_rn(1), fam(Family::RxT1), fam(Family::RxT2)});
        std::vector<RelationFact> f;
        f.push_back({Level::MadeIsometric, "Prop 2.2(1)", is_rn(3), fam(Family::SE2tilde)});
        f.push_back({Level::MadeIsometric, "Prop 2.2(2)", fam(Family::R2xT1), fam(Family::SE2k)});
        f.push_back({Level::MadeIsometric, "Prop 2.2(3)", fam(Family::SE2k), fam(Family::SE2k), true});
        f.push_back({Level::MadeIsometric, "Prop 2.2(4)", fam(Family::SL2tilde), fam(Family::AffRxR)});
        f.push_back({Level::MadeIsometric, "Prop 2.2(5)", fam(Family::AffRxT1), fam(Family::PSL2k)});
        f.push_back({Level::MadeIsometric, "Prop 2.2(6)", detail::is_d1(), fam(Family::Clambda)});
        f.push_back({Level::MadeIsometric, "Prop 2.2(7)", fam(Family::Clambda), fam(Family::Clambda), true});
        f.push_back({Level::BiLipschitz, "Prop 2.7", fam(Family::PSL2k), fam(Family::PSL2k), true});
        f.push_back({Level::QIHomeomorphic, "Prop 2.9(1)", fam(Family::R2xT1), fam(Family::N3star)});
        f.push_back({Level::QIHomeomorphic, "Prop 2.9(2)", fam(Family::SE2k), fam(Family::N3star)});
        f.push_back({Level::QI, "Prop 2.10(1)", compact, compact, true});
        f.push_back({Level::QI, "Prop 2.10(2)", line_like, line_like, true});
        f.push_back({Level::QI, "Prop 2.10(3)", is_rn(2), fam(Family::R2xT1)});
        f.push_back({Level::QI, "Prop 2.10(4)", fam(Family::AffR), fam(Family::AffRxT1)});
        f.push_back({Level::QI, "Prop 2.10(5)", is_rn(2), fam(Family::N3star)});
        f.push_back({Level::QI, "Prop 2.10(6)", is_rn(2), fam(Family::SE2k)});
        f.push_back({Level::QI, "Prop 2.10(7)", fam(Family::AffR), fam(Family::PSL2k)});
        return f;
    }();
    return facts;
}

// Strongest directly encoded fact between two canonical specs.
inline std::optional<RelationVerdict> direct_fact(const GroupSpec& a, const GroupSpec& b) {
    std::optional<RelationVerdict> best;
    for (const auto& f : relation_facts()) {
        bool hit = (f.left(a) && f.right(b)) || (f.left(b) && f.right(a));
        if (!hit) continue;
        if (f.distinct && same_spec(a, b)) continue;
        if (!best || f.level > best->level) best = RelationVerdict{f.level, f.citation};
    }
    return best;
}

inline std::vector<std::string> representative_names() {
    return {"T^1",     "T^2",      "T^3",   "SU2",       "SO3",         "R^1",         "RxT1",
            "RxT2",    "R^2",      "R2xT1", "N3*",       "SE2:k=1",     "SE2:k=2",     "R^3",
            "SE2~",    "N3",       "SL2~",  "AffRxR",    "D:lambda=-1", "D:lambda=-0.5", "AffR",
            "AffRxT1", "PSL2:k=1", "PSL2:k=2", "J",      "D:lambda=1",  "C:lambda=1",  "C:lambda=2",
            "D:lambda=0.5"};
}

inline std::vector<GroupSpec> representatives() {
    std::vector<GroupSpec> r;
    for (const auto& n : representative_names()) r.push_back(parse_spec(n));
    return r;
}

// Widest-path closure over the representative set plus the two queried groups.
// A path of two or more edges is capped at BiLipschitz: composing isometries for
// different metrics only gives a bi-Lipschitz map.
inline RelationVerdict strongest_relation(const GroupSpec& a0, const GroupSpec& b0) {
    GroupSpec a = canonical(a0), b = canonical(b0);
    if (same_spec(a, b)) return {Level::Isomorphic, "isomorphic"};

    std::optional<RelationVerdict> direct = direct_fact(a, b);
    if (direct && direct->level >= Level::BiLipschitz) return *direct;

    std::vector<GroupSpec> nodes{a, b};
    for (const auto& r : representatives()) {
        bool dup = false;
        for (const auto& n : nodes) dup = dup || same_spec(n, r);
        if (!dup) nodes.push_back(r);
    }
    const std::size_t N = nodes.size();
    std::vector<std::vector<std::optional<RelationVerdict>>> edge(N, std::vector<std::optional<RelationVerdict>>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) edge[i][j] = edge[j][i] = direct_fact(nodes[i], nodes[j]);

    // best[i]: strongest path level from node 0 to i, with its citation chain.
    std::vector<int> best(N, -1), hops(N, 0);
    std::vector<std::string> cite(N);
    best[0] = static_cast<int>(Level::Isomorphic);
    std::vector<bool> done(N, false);
    for (std::size_t it = 0; it < N; ++it) {
        int u = -1;
        for (std::size_t i = 0; i < N; ++i)
            if (!done[i] && best[i] >= 0 && (u < 0 || best[i] > best[static_cast<std::size_t>(u)])) u = static_cast<int>(i);
        if (u < 0) break;
        done[static_cast<std::size_t>(u)] = true;
        for (std::size_t v = 0; v < N; ++v) {
            const auto& e = edge[static_cast<std::size_t>(u)][v];
            if (done[v] || !e) continue;
            int lvl = std::min(best[static_cast<std::size_t>(u)], static_cast<int>(e->level));
            int h = hops[static_cast<std::size_t>(u)] + 1;
            if (h >= 2) lvl = std::min(lvl, static_cast<int>(Level::BiLipschitz));
            if (lvl > best[v] || (lvl == best[v] && h < hops[v])) {
                best[v] = lvl;
                hops[v] = h;
                cite[v] = cite[static_cast<std::size_t>(u)].empty() ? e->citation
                                                                     : cite[static_cast<std::size_t>(u)] + " + " + e->citation;
            }
        }
    }
    if (best[1] > 0 && (!direct || best[1] > static_cast<int>(direct->level)))
        return {static_cast<Level>(best[1]), cite[1]};
    if (direct) return *direct;
    if (classify(a) == classify(b)) return {Level::QI, "Theorem 1.2"};
    return {Level::NotQI, "Theorem 1.2"};
}

struct ClassificationMatrix {
    std::vector<std::string> names;
    std::vector<ClassLabel> labels;
    std::vector<std::vector<RelationVerdict>> verdicts;
};

inline ClassificationMatrix classification_matrix() {
    ClassificationMatrix m;
    m.names = representative_names();
    std::vector<GroupSpec> reps = representatives();
    for (const auto& r : reps) m.labels.push_back(classify(r));
    std::size_t n = reps.size();
    m.verdicts.assign(n, std::vector<RelationVerdict>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.verdicts[i][j] = m.verdicts[j][i] = strongest_relation(reps[i], reps[j]);
    return m;
}

// ---------------------------------------------------------------------------
// Real-part Jordan form up to positive scaling

struct JordanInvariant {
    double ratio;  // smaller over larger real part, in (0, 1]
    bool block;    // nontrivial Jordan block
};

inline JordanInvariant jordan_invariant(const Mat2& A0) {
    Mat2 A = detail::unit_scaled(A0);
    detail::Spectrum sp = detail::spectrum(A);
    if (!(std::min(sp.re1, sp.re2) > detail::kEigenThreshold))
        throw NotApplicable("eigenvalues must have positive real parts");
    if (sp.complex) return {1.0, false};
    if (sp.repeated) {
        Mat2 N = A - sp.re1 * Mat2::Identity();
        return {1.0, N.cwiseAbs().maxCoeff() >= detail::kEigenThreshold};
    }
    return {sp.re2 / sp.re1, false};
}

inline bool jordan_scaling_equivalent(const Mat2& A, const Mat2& B) {
    JordanInvariant a = jordan_invariant(A), b = jordan_invariant(B);
    return a.block == b.block && same_lambda(a.ratio, b.ratio);
}

inline GroupSpec sol_identification(double m, double n) {
    if (!(m > 0.0) || !(n > 0.0) || !std::isfinite(m) || !std::isfinite(n))
        throw NotApplicable("Sol(m,n) needs m, n > 0");
    if (n > m) std::swap(m, n);
    return groups::D(-n / m);
}

}  // namespace lieatlas
