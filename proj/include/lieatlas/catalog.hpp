#pragma once

#include <Eigen/Dense>

#include <array>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lieatlas {

// Small fixed-capacity types; every chart has dimension <= 4.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using Mat2 = Eigen::Matrix2d;

enum class Family {
    Rn, Tn, RxT1, RxT2, R2xT1, N3, N3star, SE2tilde, SE2k, AffR, AffRxR, AffRxT1,
    J, Dlambda, Clambda, SU2, SO3, SL2tilde, PSL2k, SemidirectA
};

struct GroupSpec {
    Family family = Family::Rn;
    int n = 3;            // Rn, Tn
    double lambda = 0.0;  // Dlambda, Clambda
    int k = 0;            // SE2k, PSL2k
    Mat2 A = Mat2::Zero();  // SemidirectA
    bool chartable = true;
};

struct Chart {
    int dim = 0;
    std::vector<std::optional<double>> periods;
};

struct GroupElement {
    Vec coords;

    GroupElement() = default;
    explicit GroupElement(const Vec& c) : coords(c) {}
    GroupElement(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size())) {
        Eigen::Index i = 0;
        for (double v : c) coords[i++] = v;
    }
    double operator[](Eigen::Index i) const { return coords[i]; }
    double& operator[](Eigen::Index i) { return coords[i]; }
    Eigen::Index size() const { return coords.size(); }
};

// c(k, i, j) = c^k_ij, zero-based indices.
struct LieAlgebraData {
    int dim = 0;
    std::vector<double> c;

    explicit LieAlgebraData(int d = 0) : dim(d), c(static_cast<std::size_t>(d * d * d), 0.0) {}
    double& operator()(int k, int i, int j) { return c[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
    double operator()(int k, int i, int j) const { return c[static_cast<std::size_t>((k * dim + i) * dim + j)]; }

    void set_bracket(int i, int j, int k, double v) {
        (*this)(k, i, j) = v;
        (*this)(k, j, i) = -v;
    }
};

// ---------------------------------------------------------------------------
// Constructors

namespace groups {

inline GroupSpec make(Family f) {
    GroupSpec s;
    s.family = f;
    s.chartable = !(f == Family::SL2tilde || f == Family::PSL2k);
    return s;
}

inline GroupSpec R(int n) {
    if (n < 1 || n > 3) throw InvalidSpec("R^n needs 1 <= n <= 3");
    GroupSpec s = make(Family::Rn);
    s.n = n;
    return s;
}

inline GroupSpec T(int n) {
    if (n < 1 || n > 3) throw InvalidSpec("T^n needs 1 <= n <= 3");
    GroupSpec s = make(Family::Tn);
    s.n = n;
    return s;
}

inline GroupSpec RxT1() { return make(Family::RxT1); }
inline GroupSpec RxT2() { return make(Family::RxT2); }
inline GroupSpec R2xT1() { return make(Family::R2xT1); }
inline GroupSpec N3() { return make(Family::N3); }
inline GroupSpec N3star() { return make(Family::N3star); }
inline GroupSpec SE2tilde() { return make(Family::SE2tilde); }
inline GroupSpec AffR() { return make(Family::AffR); }
inline GroupSpec AffRxR() { return make(Family::AffRxR); }
inline GroupSpec AffRxT1() { return make(Family::AffRxT1); }
inline GroupSpec J() { return make(Family::J); }
inline GroupSpec SU2() { return make(Family::SU2); }
inline GroupSpec SO3() { return make(Family::SO3); }
inline GroupSpec SL2tilde() { return make(Family::SL2tilde); }

inline GroupSpec SE2k(int k) {
    if (k < 1) throw InvalidSpec("SE2:k needs k >= 1");
    GroupSpec s = make(Family::SE2k);
    s.k = k;
    return s;
}

inline GroupSpec PSL2(int k) {
    if (k < 1) throw InvalidSpec("PSL2:k needs k >= 1");
    GroupSpec s = make(Family::PSL2k);
    s.k = k;
    return s;
}

inline GroupSpec D(double lambda) {
    if (!std::isfinite(lambda) || !((lambda >= -1.0 && lambda < 0.0) || (lambda > 0.0 && lambda <= 1.0)))
        throw InvalidSpec("D:lambda needs lambda in [-1,0) or (0,1]");
    GroupSpec s = make(Family::Dlambda);
    s.lambda = lambda;
    return s;
}

inline GroupSpec C(double lambda) {
    if (!std::isfinite(lambda) || lambda <= 0.0) throw InvalidSpec("C:lambda needs lambda > 0");
    GroupSpec s = make(Family::Clambda);
    s.lambda = lambda;
    return s;
}

inline GroupSpec semidirect(const Mat2& A) {
    if (!A.allFinite()) throw InvalidSpec("A must be finite");
    GroupSpec s = make(Family::SemidirectA);
    s.A = A;
    return s;
}

}  // namespace groups

// ---------------------------------------------------------------------------
// Family geometry kinds

enum class Kind { Abelian, Semidirect, AffR, Heisenberg, Quaternion, None };

inline Kind kind_of(const GroupSpec& s) {
    switch (s.family) {
        case Family::Rn: case Family::Tn: case Family::RxT1: case Family::RxT2: case Family::R2xT1:
            return Kind::Abelian;
        case Family::N3: case Family::N3star:
            return Kind::Heisenberg;
        case Family::AffR:
            return Kind::AffR;
        case Family::SU2: case Family::SO3:
            return Kind::Quaternion;
        case Family::SL2tilde: case Family::PSL2k:
            return Kind::None;
        default:
            return Kind::Semidirect;
    }
}

inline bool is_semidirect(const GroupSpec& s) { return kind_of(s) == Kind::Semidirect; }

// The matrix A of R^2 x|_A R for the semidirect families.
inline Mat2 semidirect_matrix(const GroupSpec& s) {
    Mat2 A;
    switch (s.family) {
        case Family::J: A << 1, 1, 0, 1; break;
        case Family::Dlambda: A << 1, 0, 0, s.lambda; break;
        case Family::Clambda: A << s.lambda, 1, -1, s.lambda; break;
        case Family::SE2tilde: case Family::SE2k: A << 0, -1, 1, 0; break;
        case Family::AffRxR: case Family::AffRxT1: A << 1, 0, 0, 0; break;
        case Family::SemidirectA: A = s.A; break;
        default: throw NotApplicable("not a semidirect product R^2 x| R");
    }
    return A;
}

inline int algebra_dim(const GroupSpec& s) {
    switch (s.family) {
        case Family::Rn: case Family::Tn: return s.n;
        case Family::RxT1: case Family::AffR: return 2;
        default: return 3;
    }
}

inline Chart chart(const GroupSpec& s) {
    Chart c;
    switch (s.family) {
        case Family::Rn:
            c.dim = s.n;
            c.periods.assign(static_cast<std::size_t>(s.n), std::nullopt);
            break;
        case Family::Tn:
            c.dim = s.n;
            c.periods.assign(static_cast<std::size_t>(s.n), 1.0);
            break;
        case Family::RxT1: c = {2, {std::nullopt, 1.0}}; break;
        case Family::RxT2: c = {3, {std::nullopt, 1.0, 1.0}}; break;
        case Family::R2xT1: c = {3, {std::nullopt, std::nullopt, 1.0}}; break;
        case Family::N3star: c = {3, {std::nullopt, std::nullopt, 1.0}}; break;
        case Family::SE2k: c = {3, {std::nullopt, std::nullopt, 2.0 * std::numbers::pi * s.k}}; break;
        case Family::AffRxT1: c = {3, {std::nullopt, 1.0, std::nullopt}}; break;
        case Family::AffR: c = {2, {std::nullopt, std::nullopt}}; break;
        case Family::SU2: case Family::SO3: c = {4, {std::nullopt, std::nullopt, std::nullopt, std::nullopt}}; break;
        case Family::SL2tilde: case Family::PSL2k:
            throw UnsupportedChart("no coordinate chart for this group");
        default: c = {3, {std::nullopt, std::nullopt, std::nullopt}}; break;
    }
    return c;
}

inline bool has_periods(const Chart& c) {
    for (const auto& p : c.periods)
        if (p) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Spec strings

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& t) {
    double v = 0.0;
    const char* b = t.data();
    const char* e = b + t.size();
    if (!t.empty() && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) throw ParseError("bad number '" + t + "'");
    return v;
}

inline int parse_int(const std::string& t) {
    int v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ParseError("bad integer '" + t + "'");
    return v;
}

inline bool near(const Mat2& a, const Mat2& b, double tol = 1e-12) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

// Named-family normal form of a spec.  Idempotent.
inline GroupSpec normalize_spec(const GroupSpec& s) {
    if (s.family != Family::SemidirectA) return s;
    const Mat2& A = s.A;
    Mat2 M;
    if (A.isZero(0.0)) return groups::R(3);
    M << 1, 1, 0, 1;
    if (detail::near(A, M)) return groups::J();
    M << 0, -1, 1, 0;
    if (detail::near(A, M)) return groups::SE2tilde();
    if (std::abs(A(0, 1)) <= 1e-12 && std::abs(A(1, 0)) <= 1e-12 && std::abs(A(0, 0) - 1.0) <= 1e-12) {
        double l = A(1, 1);
        if (std::abs(l) <= 1e-12) return groups::AffRxR();
        if ((l >= -1.0 && l < 0.0) || (l > 0.0 && l <= 1.0)) return groups::D(l);
    }
    if (std::abs(A(0, 1) - 1.0) <= 1e-12 && std::abs(A(1, 0) + 1.0) <= 1e-12 &&
        std::abs(A(0, 0) - A(1, 1)) <= 1e-12 && A(0, 0) > 0.0)
        return groups::C(A(0, 0));
    return s;
}

inline GroupSpec parse_spec(const std::string& raw) {
    std::string t;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);

    if (t == "R^1") return groups::R(1);
    if (t == "R^2") return groups::R(2);
    if (t == "R^3") return groups::R(3);
    if (t == "T^1") return groups::T(1);
    if (t == "T^2") return groups::T(2);
    if (t == "T^3") return groups::T(3);
    if (t == "RxT1") return groups::RxT1();
    if (t == "RxT2") return groups::RxT2();
    if (t == "R2xT1") return groups::R2xT1();
    if (t == "N3") return groups::N3();
    if (t == "N3*") return groups::N3star();
    if (t == "SE2~") return groups::SE2tilde();
    if (t == "AffR") return groups::AffR();
    if (t == "AffRxR") return groups::AffRxR();
    if (t == "AffRxT1") return groups::AffRxT1();
    if (t == "J") return groups::J();
    if (t == "SU2") return groups::SU2();
    if (t == "SO3") return groups::SO3();
    if (t == "SL2~") return groups::SL2tilde();

    static const std::regex k_re(R"(^(SE2|PSL2):k=([+-]?\d+)$)");
    static const std::regex l_re(R"(^(D|C):lambda=([^,\]]+)$)");
    static const std::regex a_re(R"(^A:\[\[([^,\]]+),([^,\]]+)\],\[([^,\]]+),([^,\]]+)\]\]$)");
    std::smatch m;
    try {
        if (std::regex_match(t, m, k_re)) {
            int k = detail::parse_int(m[2]);
            return m[1] == "SE2" ? groups::SE2k(k) : groups::PSL2(k);
        }
        if (std::regex_match(t, m, l_re)) {
            double l = detail::parse_double(m[2]);
            return m[1] == "D" ? groups::D(l) : groups::C(l);
        }
        if (std::regex_match(t, m, a_re)) {
            Mat2 A;
            A << detail::parse_double(m[1]), detail::parse_double(m[2]),
                 detail::parse_double(m[3]), detail::parse_double(m[4]);
            return normalize_spec(groups::semidirect(A));
        }
    } catch (const InvalidSpec& e) {
        throw ParseError(std::string("invalid group spec '") + raw + "': " + e.what());
    }
    throw ParseError("unknown group spec '" + raw + "'");
}

inline std::string to_string(const GroupSpec& s) {
    using detail::fmt_double;
    switch (s.family) {
        case Family::Rn: return "R^" + std::to_string(s.n);
        case Family::Tn: return "T^" + std::to_string(s.n);
        case Family::RxT1: return "RxT1";
        case Family::RxT2: return "RxT2";
        case Family::R2xT1: return "R2xT1";
        case Family::N3: return "N3";
        case Family::N3star: return "N3*";
        case Family::SE2tilde: return "SE2~";
        case Family::SE2k: return "SE2:k=" + std::to_string(s.k);
        case Family::AffR: return "AffR";
        case Family::AffRxR: return "AffRxR";
        case Family::AffRxT1: return "AffRxT1";
        case Family::J: return "J";
        case Family::Dlambda: return "D:lambda=" + fmt_double(s.lambda);
        case Family::Clambda: return "C:lambda=" + fmt_double(s.lambda);
        case Family::SU2: return "SU2";
        case Family::SO3: return "SO3";
        case Family::SL2tilde: return "SL2~";
        case Family::PSL2k: return "PSL2:k=" + std::to_string(s.k);
        case Family::SemidirectA:
            return "A:[[" + fmt_double(s.A(0, 0)) + "," + fmt_double(s.A(0, 1)) + "],[" +
                   fmt_double(s.A(1, 0)) + "," + fmt_double(s.A(1, 1)) + "]]";
    }
    return "?";
}

inline bool same_lambda(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Equality of normalized specs (lambda compared with relative tolerance).
inline bool same_spec(const GroupSpec& a0, const GroupSpec& b0) {
    GroupSpec a = normalize_spec(a0), b = normalize_spec(b0);
    if (a.family != b.family) return false;
    switch (a.family) {
        case Family::Rn: case Family::Tn: return a.n == b.n;
        case Family::SE2k: case Family::PSL2k: return a.k == b.k;
        case Family::Dlambda: case Family::Clambda: return same_lambda(a.lambda, b.lambda);
        case Family::SemidirectA: return detail::near(a.A, b.A, 1e-12);
        default: return true;
    }
}

// ---------------------------------------------------------------------------
// Matrix exponential

// e^{zA} in closed form.  With B = zA - sI (s = tr(zA)/2), B^2 = (disc/4) I,
// so e^{zA} = e^s (c I + t B) with c, t even functions of q^2 = disc/4.
inline Mat2 mat_exp_2x2(const Mat2& A, double z, double disc_threshold = 1e-9) {
    Mat2 M = z * A;
    double s = 0.5 * M.trace();
    Mat2 B = M - s * Mat2::Identity();
    double q2 = 0.25 * (M.trace() * M.trace() - 4.0 * M.determinant());
    double c, t;
    if (std::abs(4.0 * q2) <= disc_threshold) {
        c = 1.0 + q2 / 2.0 + q2 * q2 / 24.0;
        t = 1.0 + q2 / 6.0 + q2 * q2 / 120.0;
    } else if (q2 > 0) {
        double q = std::sqrt(q2);
        c = std::cosh(q);
        t = std::sinh(q) / q;
    } else {
        double q = std::sqrt(-q2);
        c = std::cos(q);
        t = std::sin(q) / q;
    }
    return std::exp(s) * (c * Mat2::Identity() + t * B);
}

// ---------------------------------------------------------------------------
// Element handling

inline double wrap_period(double x, double period) {
    double r = x - period * std::floor(x / period);
    if (r >= period || r < 0.0) r = 0.0;
    return r;
}

// Representative in [-P/2, P/2).
inline double wrap_symmetric(double x, double period) {
    double r = wrap_period(x + 0.5 * period, period) - 0.5 * period;
    return r;
}

namespace detail {

inline void check_element(const GroupSpec& s, const Chart& c, const Vec& p) {
    if (p.size() != c.dim)
        throw BadElement("element of dimension " + std::to_string(p.size()) + " for chart of dimension " +
                         std::to_string(c.dim) + " (" + to_string(s) + ")");
    if (!p.allFinite()) throw BadElement("non-finite coordinates");
    if (kind_of(s) == Kind::Quaternion && std::abs(p.norm() - 1.0) > 1e-6)
        throw BadElement("quaternion coordinates must have unit norm");
}

inline Chart checked_chart(const GroupSpec& s) {
    if (!s.chartable) throw UnsupportedChart(to_string(s) + " has no coordinate chart");
    return chart(s);
}

inline Vec quat_mul(const Vec& a, const Vec& b) {
    Vec r(4);
    r[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
    r[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2];
    r[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1];
    r[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0];
    return r;
}

inline Vec quat_conj(const Vec& a) {
    Vec r(4);
    r << a[0], -a[1], -a[2], -a[3];
    return r;
}

inline void so3_sign(Vec& q) {
    for (int i = 0; i < 4; ++i) {
        if (q[i] > 0.0) return;
        if (q[i] < 0.0) {
            q = -q;
            return;
        }
    }
}

}  // namespace detail

inline Vec normalize_vec(const GroupSpec& s, const Chart& c, Vec p) {
    if (kind_of(s) == Kind::Quaternion) {
        double n = p.norm();
        if (std::abs(n - 1.0) > 1e-15) p /= n;  // keeps normalization idempotent
        if (s.family == Family::SO3) detail::so3_sign(p);
        return p;
    }
    for (int i = 0; i < c.dim; ++i)
        if (c.periods[static_cast<std::size_t>(i)]) p[i] = wrap_period(p[i], *c.periods[static_cast<std::size_t>(i)]);
    return p;
}

inline GroupElement normalize_coords(const GroupSpec& s, const GroupElement& p) {
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    return GroupElement(normalize_vec(s, c, p.coords));
}

inline GroupElement identity(const GroupSpec& s) {
    Chart c = detail::checked_chart(s);
    Vec e = Vec::Zero(c.dim);
    if (kind_of(s) == Kind::Quaternion) e[0] = 1.0;
    return GroupElement(e);
}

// Group law on raw coordinates without validation or normalization.
inline Vec multiply_raw(const GroupSpec& s, const Vec& p, const Vec& q) {
    switch (kind_of(s)) {
        case Kind::Abelian:
            return p + q;
        case Kind::Semidirect: {
            Vec r(3);
            Eigen::Vector2d v = mat_exp_2x2(semidirect_matrix(s), p[2]) * Eigen::Vector2d(q[0], q[1]);
            r << p[0] + v[0], p[1] + v[1], p[2] + q[2];
            return r;
        }
        case Kind::AffR: {
            Vec r(2);
            r << p[0] + std::exp(p[1]) * q[0], p[1] + q[1];
            return r;
        }
        case Kind::Heisenberg: {
            Vec r(3);
            r << p[0] + q[0], p[1] + q[1], p[2] + q[2] + 2.0 * p[1] * q[0] - 2.0 * p[0] * q[1];
            return r;
        }
        case Kind::Quaternion:
            return detail::quat_mul(p, q);
        case Kind::None:
            break;
    }
    throw UnsupportedChart(to_string(s) + " has no coordinate chart");
}

inline Vec inverse_raw(const GroupSpec& s, const Vec& p) {
    switch (kind_of(s)) {
        case Kind::Abelian:
        case Kind::Heisenberg:
            return -p;
        case Kind::Semidirect: {
            Vec r(3);
            Eigen::Vector2d v = -(mat_exp_2x2(semidirect_matrix(s), -p[2]) * Eigen::Vector2d(p[0], p[1]));
            r << v[0], v[1], -p[2];
            return r;
        }
        case Kind::AffR: {
            Vec r(2);
            r << -std::exp(-p[1]) * p[0], -p[1];
            return r;
        }
        case Kind::Quaternion:
            return detail::quat_conj(p);
        case Kind::None:
            break;
    }
    throw UnsupportedChart(to_string(s) + " has no coordinate chart");
}

inline GroupElement multiply(const GroupSpec& s, const GroupElement& p, const GroupElement& q) {
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    detail::check_element(s, c, q.coords);
    return GroupElement(normalize_vec(s, c, multiply_raw(s, p.coords, q.coords)));
}

inline GroupElement inverse(const GroupSpec& s, const GroupElement& p) {
    Chart c = detail::checked_chart(s);
    detail::check_element(s, c, p.coords);
    return GroupElement(normalize_vec(s, c, inverse_raw(s, p.coords)));
}

// Coordinate difference with periodic components taken in [-P/2, P/2).
inline Vec wrapped_difference(const Chart& c, const Vec& a, const Vec& b) {
    Vec d = a - b;
    for (int i = 0; i < c.dim; ++i)
        if (c.periods[static_cast<std::size_t>(i)]) d[i] = wrap_symmetric(d[i], *c.periods[static_cast<std::size_t>(i)]);
    return d;
}

// Componentwise distance modulo periods (SO3: modulo sign as well).
inline double coord_deviation(const GroupSpec& s, const GroupElement& a, const GroupElement& b) {
    if (kind_of(s) == Kind::Quaternion) {
        double d = (a.coords - b.coords).cwiseAbs().maxCoeff();
        if (s.family == Family::SO3) d = std::min(d, (a.coords + b.coords).cwiseAbs().maxCoeff());
        return d;
    }
    Chart c = chart(s);
    return wrapped_difference(c, a.coords, b.coords).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Lie algebra

inline LieAlgebraData structure_constants(const GroupSpec& s) {
    LieAlgebraData L(algebra_dim(s));
    switch (kind_of(s)) {
        case Kind::Abelian:
            break;
        case Kind::Semidirect: {
            // Frame E1, E2 = columns of e^{zA}, E3 = -d/dz: [E_i, E_3] = sum_k A_ki E_k.
            Mat2 A = semidirect_matrix(s);
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k) L.set_bracket(i, 2, k, A(k, i));
            break;
        }
        case Kind::AffR:
            L.set_bracket(0, 1, 0, 1.0);
            break;
        case Kind::Heisenberg:
            L.set_bracket(0, 1, 2, -4.0);
            break;
        case Kind::Quaternion:
            L.set_bracket(0, 1, 2, 2.0);
            L.set_bracket(1, 2, 0, 2.0);
            L.set_bracket(2, 0, 1, 2.0);
            break;
        case Kind::None:
            // sl(2,R) in the basis H, E, F.
            L.set_bracket(0, 1, 1, 2.0);
            L.set_bracket(0, 2, 2, -2.0);
            L.set_bracket(1, 2, 0, 1.0);
            break;
    }
    return L;
}

// Matrix of ad_xi: (ad_xi eta)^k = sum_ij xi^i c^k_ij eta^j.
inline Mat ad_matrix(const LieAlgebraData& L, const Vec& xi) {
    Mat M = Mat::Zero(L.dim, L.dim);
    for (int k = 0; k < L.dim; ++k)
        for (int i = 0; i < L.dim; ++i) {
            if (xi[i] == 0.0) continue;
            for (int j = 0; j < L.dim; ++j) M(k, j) += xi[i] * L(k, i, j);
        }
    return M;
}

inline double jacobi_defect(const LieAlgebraData& L) {
    int n = L.dim;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    double acc = 0.0;
                    for (int l = 0; l < n; ++l)
                        acc += L(l, i, j) * L(m, l, k) + L(l, j, k) * L(m, l, i) + L(l, k, i) * L(m, l, j);
                    worst = std::max(worst, std::abs(acc));
                }
    return worst;
}

// ---------------------------------------------------------------------------
// Coverings

inline bool is_covering_pair(const GroupSpec& total, const GroupSpec& base) {
    Family t = total.family, b = base.family;
    if (t == Family::SE2tilde && b == Family::SE2k) return true;
    if (t == Family::N3 && b == Family::N3star) return true;
    if (t == Family::SU2 && b == Family::SO3) return true;
    if (t == Family::Rn) {
        if (b == Family::Tn) return base.n == total.n;
        if (b == Family::RxT1) return total.n == 2;
        if (b == Family::RxT2 || b == Family::R2xT1) return total.n == 3;
    }
    return false;
}

inline GroupElement covering_projection(const GroupSpec& total, const GroupSpec& base, const GroupElement& p) {
    if (!is_covering_pair(total, base))
        throw NotACovering(to_string(total) + " -> " + to_string(base) + " is not a supported covering");
    Chart ct = detail::checked_chart(total);
    detail::check_element(total, ct, p.coords);
    Chart cb = chart(base);
    return GroupElement(normalize_vec(base, cb, p.coords));
}

}  // namespace lieatlas
