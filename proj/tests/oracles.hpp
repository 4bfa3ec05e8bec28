#pragma once

// Reference implementations that share no code with the library: matrix
// models of the groups, power-series exponentials, finite-difference frames,
// closed-form hyperbolic distances and an epsilon-net shortest-path search.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace oracle {

using V3 = Eigen::Vector3d;
using M3 = Eigen::Matrix3d;
using M2 = Eigen::Matrix2d;

// Scaling and squaring over a truncated Taylor series.
inline M2 expm_series(const M2& A, double z) {
    M2 B = A * z;
    int squarings = 0;
    while (B.cwiseAbs().maxCoeff() > 0.125) {
        B /= 2.0;
        ++squarings;
    }
    M2 term = M2::Identity(), sum = M2::Identity();
    for (int k = 1; k <= 20; ++k) {
        term = term * B / k;
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

// (x, y, z) in R^2 x|_A R as a 3x3 affine matrix.
inline M3 affine(const M2& A, const V3& p) {
    M3 m = M3::Identity();
    m.topLeftCorner<2, 2>() = expm_series(A, p[2]);
    m(0, 2) = p[0];
    m(1, 2) = p[1];
    return m;
}

inline V3 semidirect_mul(const M2& A, const V3& p, const V3& q) {
    M3 m = affine(A, p) * affine(A, q);
    return {m(0, 2), m(1, 2), p[2] + q[2]};
}

// Heisenberg group as unipotent upper-triangular matrices, with
// (x, y, z) -> [[1, x, xy/2 - z/4], [0, 1, y], [0, 0, 1]].
inline M3 unipotent(const V3& p) {
    M3 m = M3::Identity();
    m(0, 1) = p[0];
    m(1, 2) = p[1];
    m(0, 2) = 0.5 * p[0] * p[1] - 0.25 * p[2];
    return m;
}

inline V3 heisenberg_mul(const V3& p, const V3& q) {
    M3 m = unipotent(p) * unipotent(q);
    double x = m(0, 1), y = m(1, 2);
    return {x, y, 4.0 * (0.5 * x * y - m(0, 2))};
}

// Ax + b as [[e^b, a], [0, 1]] for the chart (a, b).
inline Eigen::Vector2d affr_mul(const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    M2 P, Q;
    P << std::exp(p[1]), p[0], 0, 1;
    Q << std::exp(q[1]), q[0], 0, 1;
    M2 R = P * Q;
    return {R(0, 1), std::log(R(0, 0))};
}

// Unit quaternions through SU(2) matrices.
using C2 = Eigen::Matrix2cd;

inline C2 su2_matrix(const Eigen::Vector4d& q) {
    using c = std::complex<double>;
    C2 m;
    m << c(q[0], q[1]), c(q[2], q[3]), c(-q[2], q[3]), c(q[0], -q[1]);
    return m;
}

inline Eigen::Vector4d quat_mul(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
    C2 m = su2_matrix(a) * su2_matrix(b);
    return {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag()};
}

// Columns d/dt p * (t e_i) at t = 0 by central differences of a group law.
template <class Law>
M3 fd_frame(Law law, const V3& p, double h = 1e-5) {
    M3 F;
    for (int i = 0; i < 3; ++i) {
        V3 e = V3::Zero();
        e[i] = h;
        F.col(i) = (law(p, e) - law(p, V3(-e))) / (2.0 * h);
    }
    return F;
}

// Upper half-space distance with heights e^{z}.
inline double h3_distance(const V3& p, const V3& q) {
    double v = std::exp(p[2]), w = std::exp(q[2]);
    double num = std::pow(p[0] - q[0], 2) + std::pow(p[1] - q[1], 2) + std::pow(v - w, 2);
    return std::acosh(1.0 + num / (2.0 * v * w));
}

// Upper half-plane distance with u = x, v = e^{z}.
inline double h2_distance(double x1, double z1, double x2, double z2) {
    double v = std::exp(z1), w = std::exp(z2);
    return std::acosh(1.0 + ((x1 - x2) * (x1 - x2) + (v - w) * (v - w)) / (2.0 * v * w));
}

// Shortest paths on a cubic grid over [lo, hi]^3 with spacing eps.  Edges
// connect nodes whose offsets lie in {-k..k}^3 with coprime entries; the
// weight is the Simpson-rule length of the straight chart segment.
class EpsNet {
public:
    using MetricFn = std::function<M3(const V3&)>;

    EpsNet(double lo, double hi, double eps, int k, MetricFn g) : lo_(lo), eps_(eps), g_(std::move(g)) {
        n_ = static_cast<int>(std::lround((hi - lo) / eps)) + 1;
        for (int a = -k; a <= k; ++a)
            for (int b = -k; b <= k; ++b)
                for (int c = -k; c <= k; ++c)
                    if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) == 1) offsets_.push_back({a, b, c});
    }

    V3 point(int i, int j, int l) const { return {lo_ + i * eps_, lo_ + j * eps_, lo_ + l * eps_}; }

    int nearest(double x) const { return std::clamp(static_cast<int>(std::lround((x - lo_) / eps_)), 0, n_ - 1); }

    V3 snap(const V3& p) const { return point(nearest(p[0]), nearest(p[1]), nearest(p[2])); }

    // Distances from the grid node nearest to src to the nodes nearest to targets.
    std::vector<double> distances(const V3& src, const std::vector<V3>& targets) const {
        const std::size_t N = static_cast<std::size_t>(n_) * n_ * n_;
        std::vector<double> dist(N, std::numeric_limits<double>::infinity());
        auto idx = [&](int i, int j, int l) { return (static_cast<std::size_t>(i) * n_ + j) * n_ + l; };
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        std::size_t s = idx(nearest(src[0]), nearest(src[1]), nearest(src[2]));
        dist[s] = 0.0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            int i = static_cast<int>(u / (static_cast<std::size_t>(n_) * n_));
            int j = static_cast<int>((u / n_) % n_);
            int l = static_cast<int>(u % n_);
            V3 a = point(i, j, l);
            for (const auto& o : offsets_) {
                int i2 = i + o[0], j2 = j + o[1], l2 = l + o[2];
                if (i2 < 0 || j2 < 0 || l2 < 0 || i2 >= n_ || j2 >= n_ || l2 >= n_) continue;
                V3 b = point(i2, j2, l2);
                double w = edge(a, b);
                std::size_t v = idx(i2, j2, l2);
                if (d + w < dist[v]) {
                    dist[v] = d + w;
                    pq.push({dist[v], v});
                }
            }
        }
        std::vector<double> out;
        for (const V3& t : targets) out.push_back(dist[idx(nearest(t[0]), nearest(t[1]), nearest(t[2]))]);
        return out;
    }

private:
    double edge(const V3& a, const V3& b) const {
        V3 d = b - a;
        auto len = [&](const V3& x) { return std::sqrt(d.dot(g_(x) * d)); };
        return (len(a) + 4.0 * len(0.5 * (a + b)) + len(b)) / 6.0;
    }

    double lo_, eps_;
    int n_ = 0;
    MetricFn g_;
    std::vector<std::array<int, 3>> offsets_;
};

// Coordinate metric g = F^{-T} F^{-1} from a finite-difference frame.
template <class Law>
M3 metric_from_law(Law law, const V3& p) {
    M3 Finv = fd_frame(law, p).inverse();
    return Finv.transpose() * Finv;
}

}  // namespace oracle
