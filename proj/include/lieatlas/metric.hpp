#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "catalog.hpp"

namespace lieatlas {

// Inner product on the Lie algebra in the basis E1..En.
struct FrameMetric {
    Mat Q;

    static FrameMetric identity(int n) { return FrameMetric{Mat::Identity(n, n)}; }
    static FrameMetric scaled(int n, double c) { return FrameMetric{c * Mat::Identity(n, n)}; }
};

inline FrameMetric default_metric(const GroupSpec& s) { return FrameMetric::identity(algebra_dim(s)); }

inline void validate_metric(const GroupSpec& s, const FrameMetric& m) {
    int n = algebra_dim(s);
    if (m.Q.rows() != n || m.Q.cols() != n)
        throw BadElement("frame metric must be " + std::to_string(n) + "x" + std::to_string(n) + " for " + to_string(s));
    if (!m.Q.allFinite()) throw BadElement("frame metric has non-finite entries");
    double scale = std::max(1.0, m.Q.cwiseAbs().maxCoeff());
    if ((m.Q - m.Q.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) throw BadElement("frame metric is not symmetric");
    Eigen::LLT<Mat> llt(m.Q);
    if (llt.info() != Eigen::Success) throw BadElement("frame metric is not positive definite");
}

struct Curve {
    GroupSpec spec;
    std::vector<GroupElement> samples;
    std::vector<double> times;
};

namespace detail {

inline Mat cross_matrix(const Vec& w) {
    Mat K(3, 3);
    K << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
    return K;
}

// Left-trivialized differential of exp on su(2) in the basis i, j, k:
// (1 - e^{-ad_w}) / ad_w with ad_w = 2[w]_x.
inline Mat su2_dexp(const Vec& w) {
    Mat K = 2.0 * cross_matrix(w);
    double th = 2.0 * w.norm();
    double a, b;
    if (th < 1e-4) {
        double t2 = th * th;
        a = -(0.5 - t2 / 24.0);
        b = 1.0 / 6.0 - t2 / 120.0;
    } else {
        a = -(1.0 - std::cos(th)) / (th * th);
        b = (th - std::sin(th)) / (th * th * th);
    }
    return Mat::Identity(3, 3) + a * K + b * K * K;
}

inline Vec quat_exp(const Vec& w) {
    double a = w.norm();
    Vec q(4);
    q[0] = std::cos(a);
    double sc = a < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a;
    q.tail(3) = sc * w;
    return q;
}

// Inverse of quat_exp near the identity (SO3: sign chosen so the angle is <= pi/2).
inline Vec quat_log(Vec q, bool mod_sign) {
    if (mod_sign && q[0] < 0) q = -q;
    Vec v = q.tail(3);
    double s = v.norm();
    double phi = std::atan2(s, q[0]);
    Vec w(3);
    if (s < 1e-12) w = v;
    else w = (phi / s) * v;
    return w;
}

}  // namespace detail

// Frame matrix in the chart used for local computations.  For Euclidean charts
// x are the coordinates and the columns are E_i in coordinates; for quaternion
// charts x are exponential coordinates w around a base point p (p * exp(w)).
inline Mat local_frame(const GroupSpec& s, const Vec& x) {
    switch (kind_of(s)) {
        case Kind::Abelian:
            return Mat::Identity(x.size(), x.size());
        case Kind::Semidirect: {
            Mat F = Mat::Zero(3, 3);
            F.topLeftCorner(2, 2) = mat_exp_2x2(semidirect_matrix(s), x[2]);
            F(2, 2) = -1.0;
            return F;
        }
        case Kind::AffR: {
            Mat F(2, 2);
            F << std::exp(x[1]), 0, 0, -1;
            return F;
        }
        case Kind::Heisenberg: {
            Mat F(3, 3);
            F << 1, 0, 0, 0, 1, 0, 2.0 * x[1], -2.0 * x[0], 1;
            return F;
        }
        case Kind::Quaternion:
            return detail::su2_dexp(x).inverse();
        case Kind::None:
            break;
    }
    throw UnsupportedChart(to_string(s) + " has no coordinate chart");
}

// Inverse frame; closed forms avoid a generic inversion in the hot paths.
inline Mat local_coframe(const GroupSpec& s, const Vec& x) {
    switch (kind_of(s)) {
        case Kind::Abelian:
            return Mat::Identity(x.size(), x.size());
        case Kind::Semidirect: {
            Mat G = Mat::Zero(3, 3);
            G.topLeftCorner(2, 2) = mat_exp_2x2(semidirect_matrix(s), -x[2]);
            G(2, 2) = -1.0;
            return G;
        }
        case Kind::AffR: {
            Mat G(2, 2);
            G << std::exp(-x[1]), 0, 0, -1;
            return G;
        }
        case Kind::Heisenberg: {
            Mat G(3, 3);
            G << 1, 0, 0, 0, 1, 0, -2.0 * x[1], 2.0 * x[0], 1;
            return G;
        }
        case Kind::Quaternion:
            return detail::su2_dexp(x);
        case Kind::None:
            break;
    }
    throw UnsupportedChart(to_string(s) + " has no coordinate chart");
}

inline Mat local_metric(const GroupSpec& s, const Mat& Q, const Vec& x) {
    Mat G = local_coframe(s, x);
    return G.transpose() * Q * G;
}

// Local-chart point for p: coordinates, or w = 0 for quaternion charts.
inline Vec local_origin(const GroupSpec& s, const GroupElement& p) {
    if (kind_of(s) == Kind::Quaternion) return Vec::Zero(3);
    return p.coords;
}

// Tangent vector at p in local-chart components.  Quaternion charts accept
// either a 4-vector tangent to the sphere at p or 3 body components.
inline Vec local_tangent(const GroupSpec& s, const GroupElement& p, const Vec& v) {
    if (kind_of(s) == Kind::Quaternion) {
        if (v.size() == 3) return v;
        if (v.size() != 4) throw BadElement("quaternion tangent must have 3 or 4 components");
        return detail::quat_mul(detail::quat_conj(p.coords), v).tail(3);
    }
    if (v.size() != p.size()) throw BadElement("tangent dimension does not match chart");
    return v;
}

inline Mat frame_at(const GroupSpec& s, const GroupElement& p) {
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    if (kind_of(s) == Kind::Quaternion) {
        Mat F(4, 3);
        for (int i = 0; i < 3; ++i) {
            Vec e = Vec::Zero(4);
            e[i + 1] = 1.0;
            F.col(i) = detail::quat_mul(p.coords, e);
        }
        return F;
    }
    return local_frame(s, p.coords);
}

inline Mat metric_tensor(const GroupSpec& s, const FrameMetric& m, const GroupElement& p) {
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    validate_metric(s, m);
    Mat g = local_metric(s, m.Q, local_origin(s, p));
    if (!g.allFinite()) throw SingularFrame("metric tensor overflowed at this point");
    return g;
}

inline double volume_density(const GroupSpec& s, const FrameMetric& m, const GroupElement& p) {
    return std::sqrt(metric_tensor(s, m, p).determinant());
}

// Cheap density without validation, for Monte Carlo loops.
inline double volume_density_raw(const GroupSpec& s, double sqrt_det_q, const Vec& x) {
    switch (kind_of(s)) {
        case Kind::Semidirect:
            return sqrt_det_q * std::exp(-semidirect_matrix(s).trace() * x[2]);
        case Kind::AffR:
            return sqrt_det_q * std::exp(-x[1]);
        default:
            return sqrt_det_q;
    }
}

// Length of a chart step from a to b with the piecewise-linear interpolant,
// trapezoidal in the speed.  Quaternion steps use the body logarithm.
inline double step_length(const GroupSpec& s, const Chart& c, const Mat& Q, const Vec& a, const Vec& b) {
    if (kind_of(s) == Kind::Quaternion) {
        Vec w = detail::quat_log(detail::quat_mul(detail::quat_conj(a), b), s.family == Family::SO3);
        return std::sqrt(w.dot(Q * w));
    }
    Vec d = wrapped_difference(c, b, a);
    double la = std::sqrt(std::max(0.0, d.dot(local_metric(s, Q, a) * d)));
    double lb = std::sqrt(std::max(0.0, d.dot(local_metric(s, Q, a + d) * d)));
    return 0.5 * (la + lb);
}

inline double curve_length(const GroupSpec& s, const FrameMetric& m, const Curve& curve) {
    if (curve.samples.size() < 2) throw BadElement("a curve needs at least two samples");
    Chart c = detail::checked_chart(s);
    validate_metric(s, m);
    double L = 0.0;
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
        detail::check_element(s, c, curve.samples[i + 1].coords);
        L += step_length(s, c, m.Q, curve.samples[i].coords, curve.samples[i + 1].coords);
    }
    return L;
}

// ---------------------------------------------------------------------------
// Curvature by finite differences of the metric tensor

namespace detail {

using Christoffel = std::array<Mat, 4>;  // Gamma[k](i, j)

inline double fd_step(double x) { return 1e-4 * (1.0 + std::abs(x)); }

inline Christoffel christoffel(const GroupSpec& s, const Mat& Q, const Vec& x) {
    int n = static_cast<int>(x.size());
    std::array<Mat, 4> dg;  // dg[m] = d g / d x^m
    for (int m = 0; m < n; ++m) {
        double h = fd_step(x[m]);
        Vec xp = x, xm = x;
        xp[m] += h;
        xm[m] -= h;
        dg[m] = (local_metric(s, Q, xp) - local_metric(s, Q, xm)) / (2.0 * h);
    }
    Mat ginv = local_metric(s, Q, x).inverse();
    Christoffel G;
    for (int k = 0; k < n; ++k) G[k] = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec low(n);
            for (int l = 0; l < n; ++l) low[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
            Vec up = ginv * low;
            for (int k = 0; k < n; ++k) G[k](i, j) = up[k];
        }
    return G;
}

}  // namespace detail

inline double sectional_curvature_local(const GroupSpec& s, const Mat& Q, const Vec& x, const Vec& u, const Vec& v) {
    int n = static_cast<int>(x.size());
    Mat g = local_metric(s, Q, x);
    double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
    double gram = uu * vv - uv * uv;
    if (!(gram > 1e-12 * uu * vv)) throw DegeneratePlane("tangent vectors do not span a plane");

    detail::Christoffel G0 = detail::christoffel(s, Q, x);
    std::array<detail::Christoffel, 4> dG;
    for (int m = 0; m < n; ++m) {
        double h = detail::fd_step(x[m]);
        Vec xp = x, xm = x;
        xp[m] += h;
        xm[m] -= h;
        detail::Christoffel Gp = detail::christoffel(s, Q, xp), Gm = detail::christoffel(s, Q, xm);
        for (int k = 0; k < n; ++k) dG[m][k] = (Gp[k] - Gm[k]) / (2.0 * h);
    }
    // (R(u,v)v)^l with R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik.
    Vec Ruvv = Vec::Zero(n);
    for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double w = u[i] * v[j] * v[k];
                    if (w == 0.0) continue;
                    double r = dG[i][l](j, k) - dG[j][l](i, k);
                    for (int m = 0; m < n; ++m) r += G0[l](i, m) * G0[m](j, k) - G0[l](j, m) * G0[m](i, k);
                    acc += w * r;
                }
        Ruvv[l] = acc;
    }
    return u.dot(g * Ruvv) / gram;
}

inline double sectional_curvature(const GroupSpec& s, const FrameMetric& m, const GroupElement& p, const Vec& u,
                                  const Vec& v) {
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    validate_metric(s, m);
    if (algebra_dim(s) < 2) throw DegeneratePlane("a one-dimensional group has no 2-planes");
    return sectional_curvature_local(s, m.Q, local_origin(s, p), local_tangent(s, p, u), local_tangent(s, p, v));
}

}  // namespace lieatlas
