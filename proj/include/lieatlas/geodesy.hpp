#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "catalog.hpp"
#include "classify.hpp"
#include "metric.hpp"
#include "random.hpp"

namespace lieatlas {

// ---------------------------------------------------------------------------
// Precomputed data for one (group, metric) pair

struct Geometry {
    struct Bracket {
        int k, i, j;
        double v;
    };

    GroupSpec spec;
    Chart chart;
    Kind kind = Kind::Abelian;
    int n = 0;  // algebra dimension
    Mat Q, Qinv, Qchol_inv_t;
    double sqrt_det_q = 1.0;
    Mat2 A = Mat2::Zero();
    std::vector<Bracket> brackets;
    double rate_scale = 1.0;  // rough angular rate of the body velocity per unit speed
    bool flat = false;        // metric constant in chart coordinates
    double conformal_rate = 0.0;  // l > 0 when A = l I + m rot and Q is isotropic on (x, y)
    Mat g0;
    std::optional<double> scalar_q;
    Mat coframe_e;
    Vec identity;
};

inline Geometry make_geometry(const GroupSpec& s, const FrameMetric& m) {
    Geometry G;
    G.chart = detail::checked_chart(s);
    validate_metric(s, m);
    G.spec = s;
    G.kind = kind_of(s);
    G.n = algebra_dim(s);
    G.Q = m.Q;
    G.Qinv = m.Q.inverse();
    Eigen::LLT<Mat> llt(m.Q);
    Mat Lm = llt.matrixL();
    G.Qchol_inv_t = Lm.transpose().inverse();
    G.sqrt_det_q = std::sqrt(m.Q.determinant());
    if (G.kind == Kind::Semidirect) G.A = semidirect_matrix(s);
    LieAlgebraData L = structure_constants(s);
    double cmax = 0.0;
    for (int k = 0; k < G.n; ++k)
        for (int i = 0; i < G.n; ++i)
            for (int j = 0; j < G.n; ++j)
                if (L(k, i, j) != 0.0) {
                    G.brackets.push_back({k, i, j, L(k, i, j)});
                    cmax = std::max(cmax, std::abs(L(k, i, j)));
                }
    Eigen::SelfAdjointEigenSolver<Mat> es(m.Q);
    double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    G.rate_scale = std::max(1.0, cmax * std::sqrt(cond));
    G.identity = identity(s).coords;
    if (G.kind != Kind::Quaternion) {
        G.coframe_e = local_coframe(s, G.identity);
        G.g0 = local_metric(s, m.Q, G.identity);
        if (G.kind == Kind::Abelian) {
            G.flat = true;
        } else if (G.kind == Kind::Semidirect) {
            G.flat = true;
            for (double z : {0.7, -1.3, 2.9}) {
                Vec x = Vec::Zero(3);
                x[2] = z;
                Mat g = local_metric(s, m.Q, x);
                if ((g - G.g0).cwiseAbs().maxCoeff() > 1e-12 * G.g0.cwiseAbs().maxCoeff()) G.flat = false;
            }
        }
    } else {
        G.coframe_e = Mat::Identity(3, 3);
    }
    if (G.kind == Kind::Semidirect && !has_periods(G.chart)) {
        const Mat2& A = G.A;
        bool conformal = A(0, 0) == A(1, 1) && A(0, 1) == -A(1, 0) && A(0, 0) > 0.0;
        bool iso_q = m.Q(0, 1) == 0.0 && m.Q(0, 2) == 0.0 && m.Q(1, 2) == 0.0 && m.Q(0, 0) == m.Q(1, 1);
        if (conformal && iso_q) G.conformal_rate = A(0, 0);
    }
    double q00 = m.Q(0, 0);
    if ((m.Q - q00 * Mat::Identity(G.n, G.n)).cwiseAbs().maxCoeff() <= 1e-15 * q00) G.scalar_q = q00;
    return G;
}

// ---------------------------------------------------------------------------
// Body-frame geodesic flow: x' = F(x) xi, Q xi' = ad_xi^T Q xi.

namespace detail {

inline void flow_rhs(const Geometry& G, const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) {
    Vec mu = G.Q * xi;
    Vec f = Vec::Zero(G.n);
    for (const auto& b : G.brackets) f[b.j] += xi[b.i] * b.v * mu[b.k];
    dxi = G.Qinv * f;
    switch (G.kind) {
        case Kind::Abelian:
            dx = xi;
            break;
        case Kind::Semidirect: {
            Mat2 E = mat_exp_2x2(G.A, x[2]);
            dx.resize(3);
            dx[0] = E(0, 0) * xi[0] + E(0, 1) * xi[1];
            dx[1] = E(1, 0) * xi[0] + E(1, 1) * xi[1];
            dx[2] = -xi[2];
            break;
        }
        case Kind::AffR:
            dx.resize(2);
            dx[0] = std::exp(x[1]) * xi[0];
            dx[1] = -xi[1];
            break;
        case Kind::Heisenberg:
            dx.resize(3);
            dx[0] = xi[0];
            dx[1] = xi[1];
            dx[2] = 2.0 * x[1] * xi[0] - 2.0 * x[0] * xi[1] + xi[2];
            break;
        case Kind::Quaternion: {
            Vec w(4);
            w << 0.0, xi[0], xi[1], xi[2];
            dx = quat_mul(x, w);
            break;
        }
        case Kind::None:
            throw UnsupportedChart("no chart");
    }
}

}  // namespace detail

struct FlowState {
    Vec x;
    Vec xi;
};

// RK4 over t in [0, T]; optionally records every step (unwrapped coordinates).
inline FlowState integrate_flow(const Geometry& G, Vec x, Vec xi, int steps, double T = 1.0,
                                std::vector<Vec>* trace = nullptr) {
    double h = T / steps;
    Vec k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
    if (trace) trace->push_back(x);
    for (int s = 0; s < steps; ++s) {
        detail::flow_rhs(G, x, xi, k1x, k1v);
        detail::flow_rhs(G, x + 0.5 * h * k1x, xi + 0.5 * h * k1v, k2x, k2v);
        detail::flow_rhs(G, x + 0.5 * h * k2x, xi + 0.5 * h * k2v, k3x, k3v);
        detail::flow_rhs(G, x + h * k3x, xi + h * k3v, k4x, k4v);
        x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        xi += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (G.kind == Kind::Quaternion) x /= x.norm();
        if (trace) trace->push_back(x);
    }
    return {x, xi};
}

inline double q_norm(const Geometry& G, const Vec& xi) { return std::sqrt(std::max(0.0, xi.dot(G.Q * xi))); }

// ---------------------------------------------------------------------------
// Geodesic shooting with Christoffel symbols (chart route)

struct ShootOptions {
    double escape_bound = 1e8;
};

inline Curve geodesic_shoot_body(const GroupSpec& s, const FrameMetric& m, const GroupElement& p, const Vec& xi0,
                                 double T, int steps, const ShootOptions& opt = {}) {
    if (steps < 8) throw BadElement("geodesic_shoot needs at least 8 steps");
    Geometry G = make_geometry(s, m);
    detail::check_element(s, G.chart, p.coords);
    Curve c;
    c.spec = s;
    Vec x = p.coords, xi = xi0;
    double h = T / steps;
    c.samples.push_back(p);
    c.times.push_back(0.0);
    for (int i = 0; i < steps; ++i) {
        FlowState f = integrate_flow(G, x, xi, 1, h);
        x = f.x;
        xi = f.xi;
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opt.escape_bound)
            throw IntegrationEscape("geodesic left the coordinate bound");
        c.samples.emplace_back(normalize_vec(s, G.chart, x));
        c.times.push_back(h * (i + 1));
    }
    return c;
}

inline Curve geodesic_shoot(const GroupSpec& s, const FrameMetric& m, const GroupElement& p, const Vec& v, double T,
                            int steps, const ShootOptions& opt = {}) {
    if (steps < 8) throw BadElement("geodesic_shoot needs at least 8 steps");
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    validate_metric(s, m);
    if (kind_of(s) == Kind::Quaternion) return geodesic_shoot_body(s, m, p, local_tangent(s, p, v), T, steps, opt);
    if (v.size() != c.dim) throw BadElement("tangent dimension does not match chart");

    int n = c.dim;
    auto accel = [&](const Vec& x, const Vec& u) {
        detail::Christoffel Gm = detail::christoffel(s, m.Q, x);
        Vec a(n);
        for (int k = 0; k < n; ++k) a[k] = -u.dot(Gm[k] * u);
        return a;
    };
    Curve out;
    out.spec = s;
    out.samples.push_back(p);
    out.times.push_back(0.0);
    Vec x = p.coords, u = v;
    double h = T / steps;
    for (int i = 0; i < steps; ++i) {
        Vec k1x = u, k1u = accel(x, u);
        Vec k2x = u + 0.5 * h * k1u, k2u = accel(x + 0.5 * h * k1x, k2x);
        Vec k3x = u + 0.5 * h * k2u, k3u = accel(x + 0.5 * h * k2x, k3x);
        Vec k4x = u + h * k3u, k4u = accel(x + h * k3x, k4x);
        x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opt.escape_bound)
            throw IntegrationEscape("geodesic left the coordinate bound");
        out.samples.emplace_back(normalize_vec(s, c, x));
        out.times.push_back(h * (i + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Distance estimation

struct DistanceBudget {
    int restarts = 16;
    int max_iterations = 40;
    double tolerance = 1e-10;
    double steps_per_unit = 16.0;
    int min_steps = 24;
    int max_steps = 6000;
    bool both_directions = true;
    bool exact_fast_paths = true;
    std::uint64_t seed = 0;
};

// Cheaper settings for bulk membership queries.
inline DistanceBudget membership_budget() {
    DistanceBudget b;
    b.max_iterations = 25;
    b.tolerance = 1e-8;
    b.steps_per_unit = 10.0;
    b.min_steps = 16;
    b.restarts = 4;
    b.both_directions = false;
    return b;
}

struct DistanceOutcome {
    double distance = std::numeric_limits<double>::infinity();
    bool exact = false;
    bool shot = false;  // a converged geodesic realized the value
    int solves = 0;
};

namespace detail {

inline int steps_for(const Geometry& G, const DistanceBudget& b, double len) {
    double s = b.min_steps + b.steps_per_unit * len * G.rate_scale;
    return static_cast<int>(std::clamp(s, static_cast<double>(b.min_steps), static_cast<double>(b.max_steps)));
}

// Coordinates of the wrapped lift offsets for periodic axes.
inline std::vector<Vec> lattice_offsets(const Chart& c, int range) {
    std::vector<Vec> out{Vec::Zero(c.dim)};
    for (int i = 0; i < c.dim; ++i) {
        if (!c.periods[static_cast<std::size_t>(i)]) continue;
        double P = *c.periods[static_cast<std::size_t>(i)];
        std::vector<Vec> next;
        for (const Vec& o : out)
            for (int m = -range; m <= range; ++m) {
                Vec v = o;
                v[i] += m * P;
                next.push_back(v);
            }
        out.swap(next);
    }
    return out;
}

inline double h2_unit_distance(double dx, double z1, double z2) {
    // Horospherical H^2: ds^2 = e^{-2z} dx^2 + dz^2.
    double v1 = std::exp(z1), v2 = std::exp(z2), dv = v2 - v1;
    double a = (dx * dx + dv * dv) / (4.0 * v1 * v2);
    return 2.0 * std::asinh(std::sqrt(a));
}

// Unit-Q Heisenberg distance from the identity. Geodesics project to circles
// turning by w in [0, 2 pi) over unit time; z = w/4 + rho^2 (w - sin w) / (2 sin^2(w/2)).
inline double heisenberg_unit_distance(double rho, double z) {
    const double pi = std::numbers::pi;
    if (rho == 0.0) return z <= 0.5 * pi ? z : std::sqrt(pi * z - 0.25 * pi * pi);
    auto F = [&](double w) {
        if (w < 1e-4) return w / 4.0 + rho * rho * (w / 3.0) * (1.0 + w * w / 60.0);
        double sh = std::sin(0.5 * w);
        return w / 4.0 + rho * rho * (w - std::sin(w)) / (2.0 * sh * sh);
    };
    double a = 0.0, b = 2.0 * pi;
    for (int i = 0; i < 200 && b - a > 1e-16 * pi; ++i) {
        double m = 0.5 * (a + b);
        (F(m) < z ? a : b) = m;
    }
    double w = 0.5 * (a + b);
    double h = w < 1e-8 ? rho : rho * (0.5 * w) / std::sin(0.5 * w);
    return std::hypot(h, w / 4.0);
}

// Unit-Q lower bound for the Heisenberg chart: a curve with horizontal length l
// closed up by the chord encloses area <= (l + rho)^2 / (4 pi), and z picks up
// four times that area plus the vertical length.
inline double heisenberg_unit_lb(double rho, double z) {
    double lmax = std::sqrt(std::numbers::pi * z) - rho;
    if (lmax <= rho) return rho;
    auto f = [&](double l) {
        double v = std::max(0.0, z - (l + rho) * (l + rho) / std::numbers::pi);
        return std::sqrt(l * l + v * v);
    };
    const int M = 128;
    double h = (lmax - rho) / M;
    double best = f(lmax);
    for (int i = 0; i <= M; ++i) best = std::min(best, f(rho + h * i));
    double lip = 1.0 + 2.0 * (lmax + rho) / std::numbers::pi;
    return std::max(rho, best - 0.5 * h * lip);
}

// Diagonal A = diag(1, l), diagonal Q. Splitting q2 dz^2 as s + (1 - s) bounds the
// length below by the two half-plane lengths combined in quadrature, for every s.
inline double split_h2_lb(double q0, double q1, double q2, double l, double dx, double dy, double dz) {
    double best = 0.0;
    const int M = 40;
    for (int i = 0; i <= M; ++i) {
        double s = static_cast<double>(i) / M;
        double a = 0.0, b = 0.0;
        if (s > 0.0) a = std::sqrt(s * q2) * h2_unit_distance(dx * std::sqrt(q0 / (s * q2)), 0.0, dz);
        if (s < 1.0) {
            double w = (1.0 - s) * q2;
            if (l == 0.0) b = std::sqrt(q1 * dy * dy + w * dz * dz);
            else {
                double al = std::abs(l);
                b = std::sqrt(w) / al * h2_unit_distance(dy * al * std::sqrt(q1 / w), 0.0, l * dz);
            }
        }
        best = std::max(best, std::hypot(a, b));
    }
    return best;
}

}  // namespace detail

class DistanceEngine {
public:
    DistanceEngine(const GroupSpec& s, const FrameMetric& m, DistanceBudget b = {})
        : G_(make_geometry(s, m)), b_(b) {}

    const Geometry& geometry() const { return G_; }
    const DistanceBudget& budget() const { return b_; }

    // Exact value where the geometry is known in closed form.
    std::optional<double> exact_from_identity(const Vec& t) const {
        if (!b_.exact_fast_paths) return std::nullopt;
        if (G_.flat) {
            Vec d = wrapped_difference(G_.chart, t, G_.identity);
            double best = std::numeric_limits<double>::infinity();
            for (const Vec& o : detail::lattice_offsets(G_.chart, 1)) {
                Vec dd = d + o;
                best = std::min(best, std::sqrt(std::max(0.0, dd.dot(G_.g0 * dd))));
            }
            return best;
        }
        if (G_.kind == Kind::Semidirect && G_.conformal_rate > 0.0) {
            // e^{zA} is e^{lz} times a rotation: a rescaled hyperbolic 3-space.
            double l = G_.conformal_rate, q = G_.Q(0, 0), q3 = G_.Q(2, 2);
            double k = l * std::sqrt(q / q3);
            double rho2 = k * k * (t[0] * t[0] + t[1] * t[1]);
            double v = std::exp(l * t[2]);
            double a = (rho2 + (v - 1.0) * (v - 1.0)) / (4.0 * v);
            return std::sqrt(q3) / l * 2.0 * std::asinh(std::sqrt(a));
        }
        if (G_.kind == Kind::Heisenberg && G_.scalar_q) {
            double z = wrapped_difference(G_.chart, t, G_.identity)[2];
            return std::sqrt(*G_.scalar_q) * detail::heisenberg_unit_distance(std::hypot(t[0], t[1]), std::abs(z));
        }
        if (G_.kind == Kind::AffR && G_.Q(0, 1) == 0.0) {
            double q0 = G_.Q(0, 0), q1 = G_.Q(1, 1);
            return std::sqrt(q1) * detail::h2_unit_distance(t[0] * std::sqrt(q0 / q1), 0.0, t[1]);
        }
        if (G_.kind == Kind::Quaternion && G_.scalar_q) {
            double c = std::abs(t[0]);
            double s = t.tail(3).norm();
            double ang = G_.spec.family == Family::SO3 ? std::atan2(s, c) : std::atan2(s, t[0]);
            return std::sqrt(*G_.scalar_q) * ang;
        }
        return std::nullopt;
    }

    double lower_bound_from_identity(const Vec& t) const {
        if (auto ex = exact_from_identity(t)) return *ex;
        double lb = 0.0;
        switch (G_.kind) {
            case Kind::Semidirect: {
                double dz = wrapped_difference(G_.chart, t, G_.identity)[2];
                lb = std::abs(dz) / std::sqrt(G_.Qinv(2, 2));
                bool diag_a = G_.A(0, 1) == 0.0 && G_.A(1, 0) == 0.0 && G_.A(0, 0) == 1.0;
                bool diag_q = (G_.Q - Mat(G_.Q.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
                if (diag_a && diag_q && !has_periods(G_.chart))
                    lb = std::max(lb, detail::split_h2_lb(G_.Q(0, 0), G_.Q(1, 1), G_.Q(2, 2), G_.A(1, 1), t[0], t[1], dz));
                else if (diag_q && G_.A(1, 0) == 0.0 && G_.A(1, 1) != 0.0 && !has_periods(G_.chart)) {
                    // Upper triangular A: y alone sees e^{A11 z}, so (y, z) projects to a half-plane.
                    double d = G_.A(1, 1), ad = std::abs(d), q1 = G_.Q(1, 1), q2 = G_.Q(2, 2);
                    lb = std::max(lb, std::sqrt(q2) / ad *
                                          detail::h2_unit_distance(t[1] * ad * std::sqrt(q1 / q2), 0.0, d * dz));
                }
                break;
            }
            case Kind::AffR: {
                lb = std::abs(t[1]) / std::sqrt(G_.Qinv(1, 1));
                if (G_.Q(0, 1) == 0.0)
                    lb = std::max(lb, std::sqrt(std::min(G_.Q(0, 0), G_.Q(1, 1))) *
                                          detail::h2_unit_distance(t[0], 0.0, t[1]));
                break;
            }
            case Kind::Heisenberg: {
                Eigen::Matrix2d P = G_.Qinv.topLeftCorner(2, 2);
                Eigen::Vector2d d(t[0], t[1]);
                lb = std::sqrt(d.dot(P.inverse() * d));
                double z = wrapped_difference(G_.chart, t, G_.identity)[2];
                Eigen::SelfAdjointEigenSolver<Mat> es(G_.Q);
                lb = std::max(lb, std::sqrt(es.eigenvalues().minCoeff()) * detail::heisenberg_unit_lb(d.norm(), std::abs(z)));
                break;
            }
            default:
                break;
        }
        return lb;
    }

    // Length of explicit coordinate paths from the identity to t (best of several).
    double upper_bound_from_identity(const Vec& t) const {
        if (auto ex = exact_from_identity(t)) return *ex;
        if (G_.kind == Kind::Quaternion) {
            Vec w = detail::quat_log(t, G_.spec.family == Family::SO3);
            return q_norm(G_, w);
        }
        Vec d0 = wrapped_difference(G_.chart, t, G_.identity);
        double best = std::numeric_limits<double>::infinity();
        for (const Vec& o : detail::lattice_offsets(G_.chart, 1)) {
            Vec d = d0 + o;
            best = std::min(best, straight_length(d));
            if (G_.kind == Kind::Semidirect || G_.kind == Kind::AffR) best = std::min(best, vertical_detour(d));
            if (G_.kind == Kind::Heisenberg) best = std::min(best, heisenberg_loop(d));
        }
        return best;
    }

    // d(e, t); stops early once a path of length <= stop_below is found.
    // hints: extra initial body velocities tried before the generic guesses.
    DistanceOutcome from_identity(const Vec& t, double stop_below = -1.0, const std::vector<Vec>* hints = nullptr) const {
        DistanceOutcome out;
        if (auto ex = exact_from_identity(t)) {
            out.distance = *ex;
            out.exact = true;
            return out;
        }
        out.distance = upper_bound_from_identity(t);
        if (out.distance <= stop_below) return out;

        Vec tinv = inverse_raw(G_.spec, t);
        // With a threshold, iterates far longer than it cannot help.
        double abort_len = stop_below > 0.0 ? 1.5 * stop_below + 1.0 : std::numeric_limits<double>::infinity();
        auto record = [&](const std::optional<double>& len) {
            ++out.solves;
            if (len && *len < out.distance) {
                out.distance = *len;
                out.shot = true;
            }
            return out.distance <= stop_below;
        };

        int used = 0;
        if (hints)
            for (const Vec& xi0 : *hints)
                if (record(solve(tinv, xi0, abort_len))) return out;
        // Straight-line guesses, one per lift.
        std::vector<Vec> lifts;
        if (G_.kind == Kind::Quaternion) {
            lifts.push_back(detail::quat_log(t, G_.spec.family == Family::SO3));
        } else {
            Vec d0 = wrapped_difference(G_.chart, t, G_.identity);
            for (const Vec& o : detail::lattice_offsets(G_.chart, 1)) lifts.push_back(G_.coframe_e * (d0 + o));
            std::sort(lifts.begin(), lifts.end(),
                      [&](const Vec& a, const Vec& b) { return q_norm(G_, a) < q_norm(G_, b); });
        }
        for (const Vec& xi0 : lifts) {
            if (used >= b_.restarts) break;
            ++used;
            if (record(solve(tinv, xi0, abort_len))) return out;
        }
        // Continuation along the straight coordinate segment.
        if (G_.kind != Kind::Quaternion && used < b_.restarts) {
            ++used;
            if (record(continuation(t))) return out;
        }
        CounterRng rng = make_rng(b_.seed, 0x5eedULL);
        while (used < b_.restarts) {
            ++used;
            Vec u(G_.n);
            for (int i = 0; i < G_.n; ++i) u[i] = rng.normal();
            u /= u.norm();
            double len = out.distance * rng.uniform(0.35, 1.1);
            Vec xi0 = len * (G_.Qchol_inv_t * u);
            if (record(solve(tinv, xi0, abort_len))) return out;
        }
        return out;
    }

    double distance(const GroupElement& p, const GroupElement& q) const {
        Vec pinv = inverse_raw(G_.spec, p.coords);
        Vec t1 = normalize_vec(G_.spec, G_.chart, multiply_raw(G_.spec, pinv, q.coords));
        double d = from_identity(t1).distance;
        if (b_.both_directions && !exact_from_identity(t1)) {
            Vec t2 = normalize_vec(G_.spec, G_.chart, inverse_raw(G_.spec, t1));
            d = std::min(d, from_identity(t2).distance);
        }
        if (!std::isfinite(d)) throw NoPathFound("no admissible curve found");
        return d;
    }

    // Lower/upper bounds between two points (no shooting).
    double lower_bound(const GroupElement& p, const GroupElement& q) const {
        return lower_bound_from_identity(relative(p, q));
    }
    double upper_bound(const GroupElement& p, const GroupElement& q) const {
        return upper_bound_from_identity(relative(p, q));
    }

    Vec relative(const GroupElement& p, const GroupElement& q) const {
        return normalize_vec(G_.spec, G_.chart, multiply_raw(G_.spec, inverse_raw(G_.spec, p.coords), q.coords));
    }

    // Membership test d(e, t) <= r.
    bool within_from_identity(const Vec& t, double r, const std::vector<Vec>* hints = nullptr) const {
        if (lower_bound_from_identity(t) > r) return false;
        if (upper_bound_from_identity(t) <= r) return true;
        if (from_identity(t, r, hints).distance <= r) return true;
        if (!b_.both_directions) return false;
        Vec t2 = normalize_vec(G_.spec, G_.chart, inverse_raw(G_.spec, t));
        return from_identity(t2, r).distance <= r;
    }

    // Residual of a shot: body coordinates of t^{-1} * end.
    Vec miss(const Vec& tinv, const Vec& end) const {
        if (G_.kind == Kind::Quaternion)
            return detail::quat_log(detail::quat_mul(tinv, end), G_.spec.family == Family::SO3);
        Vec c = multiply_raw(G_.spec, tinv, end);
        for (int i = 0; i < G_.chart.dim; ++i)
            if (G_.chart.periods[static_cast<std::size_t>(i)])
                c[i] = wrap_symmetric(c[i], *G_.chart.periods[static_cast<std::size_t>(i)]);
        return G_.coframe_e * c;
    }

    Vec shoot(const Vec& tinv, const Vec& xi, int steps) const {
        FlowState f = integrate_flow(G_, G_.identity, xi, steps);
        if (!f.x.allFinite()) return Vec::Constant(G_.n, 1e150);
        Vec r = miss(tinv, f.x);
        if (!r.allFinite()) return Vec::Constant(G_.n, 1e150);
        return r;
    }

    // Levenberg-Marquardt on the endpoint miss; returns a validated length.
    std::optional<double> solve(const Vec& tinv, Vec xi,
                                double abort_len = std::numeric_limits<double>::infinity()) const {
        const int n = G_.n;
        int N = detail::steps_for(G_, b_, q_norm(G_, xi));
        Vec r = shoot(tinv, xi, N);
        double rn = r.norm();
        double mu = 1e-3;
        double cap = 50.0 * (1.0 + q_norm(G_, xi)) + 50.0;
        for (int it = 0; it < b_.max_iterations; ++it) {
            if (rn < b_.tolerance * (1.0 + xi.norm())) {
                Vec r2 = shoot(tinv, xi, 2 * N);
                solved_xi_ = xi;
                return q_norm(G_, xi) + q_norm(G_, r2);
            }
            Mat J(n, n);
            for (int j = 0; j < n; ++j) {
                double h = 1e-7 * std::max(1.0, xi.norm());
                Vec xj = xi;
                xj[j] += h;
                J.col(j) = (shoot(tinv, xj, N) - r) / h;
            }
            if (!J.allFinite()) return std::nullopt;
            Mat H = J.transpose() * J;
            Vec g = J.transpose() * r;
            bool accepted = false;
            for (int trial = 0; trial < 10; ++trial) {
                Mat Hd = H;
                for (int i = 0; i < n; ++i) Hd(i, i) += mu * H(i, i) + 1e-300;
                Vec delta = -Hd.ldlt().solve(g);
                if (!delta.allFinite()) {
                    mu *= 10.0;
                    continue;
                }
                Vec xn = xi + delta;
                if (xn.norm() > cap) {
                    mu *= 4.0;
                    continue;
                }
                Vec rnew = shoot(tinv, xn, N);
                if (rnew.norm() < rn) {
                    xi = xn;
                    r = rnew;
                    rn = r.norm();
                    mu = std::max(mu / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if (!accepted || q_norm(G_, xi) > abort_len) return std::nullopt;
            int N2 = detail::steps_for(G_, b_, q_norm(G_, xi));
            if (N2 > N) {
                N = N2;
                r = shoot(tinv, xi, N);
                rn = r.norm();
            }
        }
        return std::nullopt;
    }

private:
    double straight_length(const Vec& d) const {
        const int M = 16;
        double L = 0.0;
        double prev = std::sqrt(std::max(0.0, d.dot(local_metric(G_.spec, G_.Q, G_.identity) * d)));
        for (int i = 1; i <= M; ++i) {
            Vec x = G_.identity + (static_cast<double>(i) / M) * d;
            double cur = std::sqrt(std::max(0.0, d.dot(local_metric(G_.spec, G_.Q, x) * d)));
            L += 0.5 * (prev + cur) / M;
            prev = cur;
        }
        return L;
    }

    // Leave along the z-axis to height h, move horizontally, come back.
    double vertical_detour(const Vec& d) const {
        const int zi = G_.chart.dim - 1;
        double zt = d[zi];
        double vz = std::sqrt(G_.Q(zi, zi));
        auto horiz = [&](double h, const Vec& v) {
            if (G_.kind == Kind::AffR) {
                double b = std::exp(-h) * v[0];
                return std::sqrt(G_.Q(0, 0)) * std::abs(b);
            }
            Eigen::Vector2d b = mat_exp_2x2(G_.A, -h) * Eigen::Vector2d(v[0], v[1]);
            return std::sqrt(std::max(0.0, b.dot(G_.Q.topLeftCorner(2, 2) * b)));
        };
        double lo = std::min(0.0, zt), hi = std::max(0.0, zt);
        double span = std::max(4.0, hi - lo + 2.0 * std::log1p(d.head(zi).cwiseAbs().maxCoeff()) + 4.0);
        auto one_leg = [&](double h) { return vz * (std::abs(h) + std::abs(h - zt)) + horiz(h, d); };
        double best = std::numeric_limits<double>::infinity();
        double hbest = 0.0;
        const int M = 80;
        for (int i = 0; i <= M; ++i) {
            double h = lo - span + (hi - lo + 2.0 * span) * i / M;
            double v = one_leg(h);
            if (v < best) {
                best = v;
                hbest = h;
            }
        }
        // Golden-section refinement around the grid minimum.
        double step = (hi - lo + 2.0 * span) / M;
        double a = hbest - step, c = hbest + step;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 40; ++it) {
            double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
            if (one_leg(x1) < one_leg(x2)) c = x2;
            else a = x1;
        }
        best = std::min(best, one_leg(0.5 * (a + c)));

        // Diagonal A: move along x and y at two different heights.
        if (G_.kind == Kind::Semidirect && G_.A(0, 1) == 0.0 && G_.A(1, 0) == 0.0) {
            Vec vx = Vec::Zero(3), vy = Vec::Zero(3);
            vx[0] = d[0];
            vy[1] = d[1];
            const int K = 40;
            for (int i = 0; i <= K; ++i) {
                double h1 = lo - span + (hi - lo + 2.0 * span) * i / K;
                for (int j = 0; j <= K; ++j) {
                    double h2 = lo - span + (hi - lo + 2.0 * span) * j / K;
                    double v = vz * (std::abs(h1) + std::abs(h2 - h1) + std::abs(zt - h2)) + horiz(h1, vx) + horiz(h2, vy);
                    double w = vz * (std::abs(h2) + std::abs(h1 - h2) + std::abs(zt - h1)) + horiz(h2, vy) + horiz(h1, vx);
                    best = std::min({best, v, w});
                }
            }
        }
        return best;
    }

    // Heisenberg: straight horizontal move, then a horizontal circle enclosing
    // part of the required z, the rest vertically.
    double heisenberg_loop(const Vec& d) const {
        Vec h = Vec::Zero(3);
        h[0] = d[0];
        h[1] = d[1];
        double l_h = std::sqrt(std::max(0.0, h.dot(G_.Q * h)));
        double zrem = std::abs(d[2]);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(G_.Q.topLeftCorner(2, 2));
        double smax = std::sqrt(es.eigenvalues().maxCoeff());
        double vz = std::sqrt(G_.Q(2, 2));
        // A circle of coordinate radius rho costs <= 2 pi rho smax and shifts z by 4 pi rho^2.
        double best = l_h + vz * zrem;
        double rho_full = std::sqrt(zrem / (4.0 * std::numbers::pi));
        const int M = 60;
        for (int i = 1; i <= M; ++i) {
            double rho = rho_full * i / M;
            double cost = l_h + 2.0 * std::numbers::pi * rho * smax + vz * (zrem - 4.0 * std::numbers::pi * rho * rho);
            best = std::min(best, cost);
        }
        // Circular arc over the chord: half-angle a, radius c / (2 sin a).
        double c = std::hypot(d[0], d[1]);
        if (c > 0.0) {
            for (int i = 1; i < 4 * M; ++i) {
                double a = std::numbers::pi * i / (4 * M);
                double R = c / (2.0 * std::sin(a));
                double area4 = 4.0 * R * R * (a - std::sin(a) * std::cos(a));
                if (area4 > zrem) break;
                best = std::min(best, smax * 2.0 * R * a + vz * (zrem - area4));
            }
        }
        return best;
    }

    std::optional<double> continuation(const Vec& t) const {
        Vec d = wrapped_difference(G_.chart, t, G_.identity);
        Vec xi = G_.coframe_e * (0.25 * d);
        std::optional<double> len;
        for (int k = 1; k <= 4; ++k) {
            double s = 0.25 * k;
            Vec ts = normalize_vec(G_.spec, G_.chart, G_.identity + s * d);
            Vec tinv = inverse_raw(G_.spec, ts);
            auto sol = solve(tinv, xi);
            if (!sol) return std::nullopt;
            xi = solved_xi_;
            if (k < 4) xi *= (s + 0.25) / s;
            len = sol;
        }
        return len;
    }

    Geometry G_;
    DistanceBudget b_;
    mutable Vec solved_xi_;
};

inline double distance_estimate(const GroupSpec& s, const FrameMetric& m, const GroupElement& p, const GroupElement& q,
                                const DistanceBudget& b = {}) {
    DistanceEngine eng(s, m, b);
    detail::check_element(s, eng.geometry().chart, p.coords);
    detail::check_element(s, eng.geometry().chart, q.coords);
    return eng.distance(p, q);
}

// ---------------------------------------------------------------------------
// Ball volume by stratified Monte Carlo

struct BallOptions {
    int sweep_directions = 4096;
    int z_bins = 16;
    int x_bins = 8;
    double inflate = 0.25;
    double shell = 0.03;
    double boundary_rate = 1e-3;
    int max_expansions = 4;
    DistanceBudget budget = membership_budget();
};

struct BallVolumeReport {
    double radius = 0.0;
    double volume = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::size_t accepted = 0;
    double boundary_rate = 0.0;
    int expansions = 0;
    bool warning = false;
};

namespace detail {

inline double total_volume_compact(const Geometry& G) {
    double pi2 = std::numbers::pi * std::numbers::pi;
    return (G.spec.family == Family::SO3 ? pi2 : 2.0 * pi2) * G.sqrt_det_q;
}

struct Interval {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool empty() const { return !(hi >= lo); }
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Interval padded(double f, double abs_pad) const {
        double p = f * 0.5 * (hi - lo) + abs_pad;
        return {lo - p, hi + p};
    }
};

// One stratum: z-slab x column x lateral range; axes not split are in [lo, hi].
struct Cell {
    Vec lo, hi;
    std::vector<bool> shell_lo, shell_hi;  // faces that bound the ball
    std::vector<std::size_t> near;         // sweep points around the cell
    double vol = 0.0;
    double weight = 0.0;
};

}  // namespace detail

inline BallVolumeReport ball_volume_report(const GroupSpec& s, const FrameMetric& m, double r, int samples,
                                           std::uint64_t seed, BallOptions opt = {}) {
    if (!(r > 0.0)) throw BadElement("ball radius must be positive");
    if (samples < 16) throw InsufficientSamples("ball_volume needs at least 16 samples");
    opt.budget.seed = seed;
    DistanceEngine eng(s, m, opt.budget);
    const Geometry& G = eng.geometry();
    BallVolumeReport rep;
    rep.radius = r;

    if (G.kind == Kind::Quaternion) {
        std::size_t hit = 0;
        for (int i = 0; i < samples; ++i) {
            CounterRng rng = make_rng(seed, 2, static_cast<std::uint64_t>(i));
            Vec q(4);
            for (int k = 0; k < 4; ++k) q[k] = rng.normal();
            q /= q.norm();
            q = normalize_vec(s, G.chart, q);
            if (eng.within_from_identity(q, r)) ++hit;
        }
        double f = static_cast<double>(hit) / samples;
        double tot = detail::total_volume_compact(G);
        rep.volume = f * tot;
        rep.stderr_ = tot * std::sqrt(std::max(f * (1.0 - f), 1.0 / samples) / samples);
        rep.samples = static_cast<std::size_t>(samples);
        rep.accepted = hit;
        return rep;
    }

    const int dim = G.chart.dim;
    const int za = dim - 1;                       // slab axis
    const int xa = dim >= 2 ? 0 : -1;             // column axis
    const int ya = dim >= 3 ? 1 : -1;             // per-cell range axis
    auto period = [&](int i) { return G.chart.periods[static_cast<std::size_t>(i)]; };

    // Sweep geodesics of length r to find where the ball lives.
    std::vector<Vec> pts, dirs_xi;
    std::vector<std::pair<std::size_t, double>> origin;  // (direction, fraction of r) per sweep point
    {
        int N = detail::steps_for(G, opt.budget, r);
        int dirs = dim <= 2 ? std::max(64, opt.sweep_directions / 3) : opt.sweep_directions;
        for (int j = 0; j < dirs; ++j) {
            CounterRng rng = make_rng(seed, 1, static_cast<std::uint64_t>(j));
            Vec u(G.n);
            for (int k = 0; k < G.n; ++k) u[k] = rng.normal();
            u /= u.norm();
            std::vector<Vec> tr;
            dirs_xi.push_back(r * (G.Qchol_inv_t * u));
            integrate_flow(G, G.identity, dirs_xi.back(), N, 1.0, &tr);
            for (std::size_t k = 0; k < tr.size(); ++k)
                if (tr[k].allFinite()) {
                    pts.push_back(tr[k]);
                    origin.emplace_back(static_cast<std::size_t>(j), static_cast<double>(k) / N);
                }
        }
    }
    Vec gmin = Vec::Zero(dim), gmax = Vec::Zero(dim);
    for (const Vec& x : pts) {
        gmin = gmin.cwiseMin(x);
        gmax = gmax.cwiseMax(x);
    }

    double inflate = opt.inflate;
    for (int attempt = 0;; ++attempt) {
        std::vector<bool> full(static_cast<std::size_t>(dim), false);
        Vec lo(dim), hi(dim);
        for (int i = 0; i < dim; ++i) {
            double pad = inflate * 0.5 * (gmax[i] - gmin[i]) + 1e-3 * r;
            lo[i] = gmin[i] - pad;
            hi[i] = gmax[i] + pad;
            if (auto P = period(i); P && (hi[i] >= 0.5 * *P || lo[i] <= -0.5 * *P)) {
                full[static_cast<std::size_t>(i)] = true;
                lo[i] = -0.5 * *P;
                hi[i] = 0.5 * *P;
            }
        }
        auto isfull = [&](int i) { return i >= 0 && full[static_cast<std::size_t>(i)]; };
        std::vector<Vec> wp = pts;
        for (Vec& x : wp)
            for (int i = 0; i < dim; ++i)
                if (isfull(i)) x[i] = wrap_symmetric(x[i], *period(i));

        // Rows along z, columns along x, a y-range per cell from neighbouring sweep points.
        const int nz = dim == 1 ? 1 : opt.z_bins;
        const double zw = (hi[za] - lo[za]) / nz;
        auto zbin = [&](double z) { return std::clamp(static_cast<int>(std::floor((z - lo[za]) / zw)), 0, nz - 1); };
        std::vector<std::vector<std::size_t>> rowpts(static_cast<std::size_t>(nz));
        for (std::size_t k = 0; k < wp.size(); ++k) {
            int b = zbin(wp[k][za]);
            for (int bb = std::max(0, b - 1); bb <= std::min(nz - 1, b + 1); ++bb) rowpts[static_cast<std::size_t>(bb)].push_back(k);
        }
        std::vector<detail::Cell> cells;
        for (int b = 0; b < nz; ++b) {
            const auto& rp = rowpts[static_cast<std::size_t>(b)];
            if (rp.empty() && dim > 1) continue;
            Vec clo = lo, chi = hi;
            clo[za] = lo[za] + zw * b;
            chi[za] = clo[za] + zw;
            std::vector<bool> slo(static_cast<std::size_t>(dim), false), shi(static_cast<std::size_t>(dim), false);
            if (!isfull(za)) {
                slo[static_cast<std::size_t>(za)] = b == 0;
                shi[static_cast<std::size_t>(za)] = b == nz - 1;
            }
            if (dim == 1) {
                std::vector<std::size_t> all(wp.size());
                for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
                cells.push_back({clo, chi, slo, shi, all});
                continue;
            }
            detail::Interval xr;
            if (!isfull(xa)) {
                for (std::size_t k : rp) xr.add(wp[k][xa]);
                xr = xr.padded(inflate, 1e-3 * r);
                xr.lo = std::max(xr.lo, lo[xa]);
                xr.hi = std::min(xr.hi, hi[xa]);
                slo[static_cast<std::size_t>(xa)] = shi[static_cast<std::size_t>(xa)] = true;
            } else {
                xr = {lo[xa], hi[xa]};
            }
            if (ya < 0) {
                clo[xa] = xr.lo;
                chi[xa] = xr.hi;
                cells.push_back({clo, chi, slo, shi, rp});
                continue;
            }
            const int nx = opt.x_bins;
            const double xw = (xr.hi - xr.lo) / nx;
            std::vector<detail::Interval> yr(static_cast<std::size_t>(nx));
            std::vector<std::vector<std::size_t>> colpts(static_cast<std::size_t>(nx));
            for (std::size_t k : rp) {
                int c = std::clamp(static_cast<int>(std::floor((wp[k][xa] - xr.lo) / xw)), 0, nx - 1);
                for (int cc = std::max(0, c - 1); cc <= std::min(nx - 1, c + 1); ++cc) {
                    yr[static_cast<std::size_t>(cc)].add(wp[k][ya]);
                    colpts[static_cast<std::size_t>(cc)].push_back(k);
                }
            }
            for (int c = 0; c < nx; ++c) {
                Vec l2 = clo, h2 = chi;
                auto sl = slo, sh = shi;
                l2[xa] = xr.lo + xw * c;
                h2[xa] = l2[xa] + xw;
                sl[static_cast<std::size_t>(xa)] = slo[static_cast<std::size_t>(xa)] && c == 0;
                sh[static_cast<std::size_t>(xa)] = shi[static_cast<std::size_t>(xa)] && c == nx - 1;
                if (isfull(ya)) {
                    l2[ya] = lo[ya];
                    h2[ya] = hi[ya];
                } else {
                    if (yr[static_cast<std::size_t>(c)].empty()) continue;
                    auto y = yr[static_cast<std::size_t>(c)].padded(inflate, 1e-3 * r);
                    l2[ya] = std::max(y.lo, lo[ya]);
                    h2[ya] = std::min(y.hi, hi[ya]);
                    sl[static_cast<std::size_t>(ya)] = sh[static_cast<std::size_t>(ya)] = true;
                }
                cells.push_back({l2, h2, sl, sh, std::move(colpts[static_cast<std::size_t>(c)])});
            }
        }
        double wtot = 0.0;
        for (auto& c : cells) {
            c.vol = (c.hi - c.lo).prod();
            c.weight = c.vol * volume_density_raw(s, G.sqrt_det_q, 0.5 * (c.lo + c.hi));
            wtot += c.weight;
        }

        // Membership with warm starts taken from the nearest sweep points.
        auto inside = [&](const Vec& x, const detail::Cell& c) {
            Vec xn = normalize_vec(s, G.chart, x);
            if (eng.lower_bound_from_identity(xn) > r) return false;
            if (eng.upper_bound_from_identity(xn) <= r) return true;
            Vec scale = (c.hi - c.lo).cwiseMax(1e-12);
            std::array<std::pair<double, std::size_t>, 2> best{{{1e300, 0}, {1e300, 0}}};
            for (std::size_t k : c.near) {
                double d2 = ((wp[k] - x).cwiseQuotient(scale)).squaredNorm();
                if (d2 < best[1].first) {
                    best[1] = {d2, k};
                    if (best[1].first < best[0].first) std::swap(best[0], best[1]);
                }
            }
            std::vector<Vec> hints;
            for (const auto& [d2, k] : best) {
                if (d2 >= 1e300) continue;
                hints.push_back(origin[k].second * dirs_xi[origin[k].first]);
            }
            if (eng.from_identity(xn, r, &hints).distance <= r) return true;
            if (!opt.budget.both_directions) return false;
            return eng.within_from_identity(normalize_vec(s, G.chart, inverse_raw(s, xn)), r);
        };
        double est = 0.0, var = 0.0;
        double shell_w = 0.0, shell_in_w = 0.0;  // Riemannian measure of the shell samples
        std::size_t hits = 0, total = 0;
        std::uint64_t counter = 0;
        for (const auto& c : cells) {
            int nc = std::max(2, static_cast<int>(std::lround(samples * c.weight / wtot)));
            double sum = 0.0, sum2 = 0.0;
            for (int i = 0; i < nc; ++i) {
                CounterRng rng = make_rng(seed, 3 + static_cast<std::uint64_t>(attempt), counter++);
                Vec x(dim);
                for (int a = 0; a < dim; ++a) x[a] = rng.uniform(c.lo[a], c.hi[a]);
                bool shell = false;
                for (int a = 0; a < dim; ++a) {
                    double w = a == za ? opt.shell * (hi[za] - lo[za]) : opt.shell * (c.hi[a] - c.lo[a]);
                    if (a == xa && ya >= 0) {
                        // Column faces: measure against the whole row.
                        w = opt.shell * (c.hi[a] - c.lo[a]) * opt.x_bins;
                    }
                    if ((c.shell_lo[static_cast<std::size_t>(a)] && x[a] < c.lo[a] + w) ||
                        (c.shell_hi[static_cast<std::size_t>(a)] && x[a] > c.hi[a] - w))
                        shell = true;
                }
                bool in = inside(x, c);
                double wall = volume_density_raw(s, G.sqrt_det_q, x) * c.vol;
                double w = in ? wall : 0.0;
                sum += w;
                sum2 += w * w;
                if (shell) {
                    shell_w += wall / nc;
                    if (in) shell_in_w += wall / nc;
                }
                if (in) ++hits;
                ++total;
            }
            double mean = sum / nc;
            est += mean;
            var += std::max(0.0, sum2 / nc - mean * mean) / nc;
        }
        rep.volume = est;
        rep.stderr_ = std::sqrt(var);
        rep.samples = total;
        rep.accepted = hits;
        rep.boundary_rate = shell_w > 0.0 ? shell_in_w / shell_w : 0.0;
        rep.expansions = attempt;
        if (rep.boundary_rate <= opt.boundary_rate) return rep;
        if (attempt >= opt.max_expansions) {
            rep.warning = true;
            return rep;
        }
        inflate = 2.0 * inflate + 0.1;
    }
}

inline double ball_volume(const GroupSpec& s, const FrameMetric& m, double r, int samples, std::uint64_t seed) {
    return ball_volume_report(s, m, r, samples, seed).volume;
}

// ---------------------------------------------------------------------------
// Growth exponent

struct GrowthReport {
    std::vector<double> radii, volumes, stderrs;
    double exponent = 0.0;        // slope of log V against log r
    double residual = 0.0;        // rms residual of that fit
    double residual_linear = 0.0; // rms residual of log V against r
    double rate = 0.0;            // slope of log V against r
    double tail_exponent = 0.0;   // log-log slope over the three largest radii
    GrowthType classification;
    bool warning = false;
};

namespace detail {

struct LineFit {
    double slope, intercept, rms;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double b = sxx > 0 ? sxy / sxx : 0.0;
    double a = my - b * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - a - b * x[i], 2);
    return {b, a, std::sqrt(ss / n)};
}

}  // namespace detail

// Largest polynomial growth degree of a connected Lie group of the given dimension.
inline int max_polynomial_degree(int dim) {
    static const int table[] = {0, 1, 2, 4, 6};
    return table[std::clamp(dim, 0, 4)];
}

// Classifies measured volumes; the fit window is r >= 2. Exponential when the
// r-linear fit beats the log-log fit by the residual ratio, or when the local
// log-log slope over the three largest radii exceeds every polynomial degree
// possible in this dimension.
inline GrowthReport fit_growth(std::vector<double> radii, std::vector<double> volumes, std::vector<double> stderrs,
                               int dim) {
    GrowthReport rep;
    rep.radii = radii;
    rep.stderrs = stderrs;
    for (std::size_t i = 1; i < volumes.size(); ++i) volumes[i] = std::max(volumes[i], volumes[i - 1]);
    rep.volumes = volumes;
    std::vector<double> lr, r, lv;
    double noise = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 2.0 || !(volumes[i] > 0.0)) continue;
        lr.push_back(std::log(radii[i]));
        r.push_back(radii[i]);
        lv.push_back(std::log(volumes[i]));
        noise = std::max(noise, stderrs[i] / volumes[i]);
    }
    if (lr.size() < 3) throw InsufficientSamples("growth fit needs at least three radii >= 2 with positive volume");
    auto flog = detail::fit_line(lr, lv);
    auto flin = detail::fit_line(r, lv);
    std::vector<double> tl(lr.end() - 3, lr.end()), tv(lv.end() - 3, lv.end());
    auto ftail = detail::fit_line(tl, tv);
    rep.exponent = flog.slope;
    rep.tail_exponent = ftail.slope;
    rep.residual = flog.rms;
    rep.residual_linear = flin.rms;
    rep.rate = flin.slope;
    double floor = std::max(0.01, 2.0 * noise);
    bool ratio_rule = flin.slope > 0.0 && flog.rms >= 4.0 * flin.rms && flog.rms > floor;
    bool degree_rule = ftail.slope > max_polynomial_degree(dim) + 0.5;
    if (ratio_rule || degree_rule) rep.classification = {true, 0};
    else rep.classification = {false, std::max(0, static_cast<int>(std::lround(flog.slope)))};
    return rep;
}

inline GrowthReport growth_exponent(const GroupSpec& s, const FrameMetric& m, const std::vector<double>& radii,
                                    int samples, std::uint64_t seed, const BallOptions& opt = {}) {
    if (radii.size() < 3) throw InsufficientSamples("growth_exponent needs at least three radii");
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end());
    std::vector<double> v, e;
    bool warn = false;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        BallVolumeReport b = ball_volume_report(s, m, rs[i], samples, derive_seed(seed, 7, i), opt);
        v.push_back(b.volume);
        e.push_back(b.stderr_);
        warn = warn || b.warning;
    }
    GrowthReport rep = fit_growth(rs, v, e, algebra_dim(s));
    rep.warning = warn;
    return rep;
}

}  // namespace lieatlas
