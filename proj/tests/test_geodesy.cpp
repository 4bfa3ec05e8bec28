#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace lieatlas;
using testsupport::random_element;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec(std::initializer_list<double> v) {
    Vec r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r[i++] = x;
    return r;
}

DistanceBudget shooting_only() {
    DistanceBudget b;
    b.exact_fast_paths = false;
    return b;
}

double speed(const GroupSpec& s, const FrameMetric& m, const Curve& c, std::size_t i) {
    // Central chart difference; quaternion charts are measured through step_length.
    Chart ch = chart(s);
    std::size_t a = i == 0 ? 0 : i - 1, b = std::min(i + 1, c.samples.size() - 1);
    return step_length(s, ch, m.Q, c.samples[a].coords, c.samples[b].coords) / (c.times[b] - c.times[a]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Geodesics

TEST(GeodesicShoot, StraightLineInR3) {
    GroupSpec s = groups::R(3);
    Curve c = geodesic_shoot(s, default_metric(s), identity(s), vec({1, 0, 0}), 2.0, 16);
    EXPECT_LT((c.samples.back().coords - vec({2, 0, 0})).norm(), 1e-12);
    EXPECT_EQ(c.samples.size(), c.times.size());
    EXPECT_DOUBLE_EQ(c.times.back(), 2.0);
}

TEST(GeodesicShoot, VerticalLineInHyperbolicSpace) {
    GroupSpec s = groups::D(1.0);
    double t = 1.7;
    Curve c = geodesic_shoot(s, default_metric(s), identity(s), vec({0, 0, 1}), t, 64);
    EXPECT_LT((c.samples.back().coords - vec({0, 0, t})).norm(), 1e-9);
    EXPECT_NEAR(oracle::h3_distance({0, 0, 0}, testsupport::v3(c.samples.back())), t, 1e-9);
}

TEST(GeodesicShoot, ZeroTimeIsConstant) {
    for (const GroupSpec& s : {groups::N3(), groups::SU2(), groups::AffR()}) {
        GroupElement p = identity(s);
        Vec v = Vec::Ones(kind_of(s) == Kind::Quaternion ? 3 : chart(s).dim);
        Curve c = geodesic_shoot(s, default_metric(s), p, v, 0.0, 8);
        for (const auto& q : c.samples) EXPECT_LT(coord_deviation(s, q, p), 1e-15) << to_string(s);
    }
}

TEST(GeodesicShoot, ConservesSpeed) {
    for (const GroupSpec& s : testsupport::chartable_specs()) {
        if (algebra_dim(s) < 2) continue;
        FrameMetric m{Mat::Identity(algebra_dim(s), algebra_dim(s))};
        m.Q(0, 0) = 1.5;
        m.Q(0, 1) = m.Q(1, 0) = 0.2;
        CounterRng rng = make_rng(21, 0);
        GroupElement p = random_element(s, rng, 1.0);
        Vec v(kind_of(s) == Kind::Quaternion ? 3 : chart(s).dim);
        for (int i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1, 1);
        Curve c = geodesic_shoot(s, m, p, v, 2.0, 2000);
        double s0 = speed(s, m, c, 1);
        for (std::size_t i = 1; i + 1 < c.samples.size(); i += 50)
            EXPECT_NEAR(speed(s, m, c, i) / s0, 1.0, 1e-4) << to_string(s) << " at " << i;
    }
}

TEST(GeodesicShoot, Errors) {
    GroupSpec s = groups::D(1.0);
    EXPECT_THROW(geodesic_shoot(s, default_metric(s), identity(s), vec({0, 0, 1}), 1.0, 7), BadElement);
    ShootOptions tight;
    tight.escape_bound = 10.0;
    EXPECT_THROW(geodesic_shoot(s, default_metric(s), identity(s), vec({0, 0, 1}), 50.0, 400, tight), IntegrationEscape);
    EXPECT_THROW(geodesic_shoot(groups::SL2tilde(), FrameMetric::identity(3), {0, 0, 0}, vec({1, 0, 0}), 1.0, 8),
                 UnsupportedChart);
}

// ---------------------------------------------------------------------------
// Distance

TEST(Distance, EuclideanExample) {
    GroupSpec s = groups::R(3);
    EXPECT_NEAR(distance_estimate(s, default_metric(s), {0, 0, 0}, {1, 2, 2}, {}), 3.0, 1e-6);
    EXPECT_NEAR(distance_estimate(s, default_metric(s), {0, 0, 0}, {1, 2, 2}, shooting_only()), 3.0, 1e-6);
}

TEST(Distance, HyperbolicSpaceExample) {
    GroupSpec s = groups::D(1.0);
    double want = std::acosh(1.5);
    for (const DistanceBudget& b : {DistanceBudget{}, shooting_only()})
        EXPECT_NEAR(distance_estimate(s, default_metric(s), identity(s), {1, 0, 0}, b), want, 0.01 * want);
}

TEST(Distance, HalfSpaceClosedForm) {
    GroupSpec s = groups::D(1.0);
    DistanceEngine shoot(s, default_metric(s), shooting_only());
    for (int i = 0; i < 20; ++i) {
        CounterRng rng = make_rng(22, 0, static_cast<std::uint64_t>(i));
        GroupElement p = random_element(s, rng, 2.0), q = random_element(s, rng, 2.0);
        double want = oracle::h3_distance(testsupport::v3(p), testsupport::v3(q));
        EXPECT_NEAR(shoot.distance(p, q), want, 1e-3 * want + 1e-9);
    }
}

TEST(Distance, HalfPlaneClosedFormForAffR) {
    GroupSpec s = groups::AffR();
    DistanceEngine shoot(s, default_metric(s), shooting_only()), fast(s, default_metric(s));
    for (int i = 0; i < 20; ++i) {
        CounterRng rng = make_rng(23, 0, static_cast<std::uint64_t>(i));
        GroupElement p = random_element(s, rng), q = random_element(s, rng);
        double want = oracle::h2_distance(p[0], p[1], q[0], q[1]);
        EXPECT_NEAR(fast.distance(p, q), want, 1e-9 * (1 + want));
        EXPECT_NEAR(shoot.distance(p, q), want, 1e-3 * want + 1e-9);
    }
}

// Reference values from shooting with a tight budget and closed forms switched off.
TEST(Distance, FrozenReferenceValues) {
    struct Case {
        GroupSpec s;
        GroupElement q;
        double d;
    };
    std::vector<Case> cases{{groups::N3(), {1, 1, 1}, 1.506288507951},
                            {groups::N3(), {0, 0, 3}, 2.637683995661},
                            {groups::D(-1.0), {2, -1, 0.5}, 2.026403682132},
                            {groups::J(), {1, 0, 0}, 0.961937510149},
                            {groups::SU2(), {0, 1, 0, 0}, kPi / 2}};
    for (const auto& c : cases) {
        double d = distance_estimate(c.s, default_metric(c.s), identity(c.s), c.q, {});
        EXPECT_NEAR(d, c.d, 1e-6 * c.d) << to_string(c.s);
    }
}

TEST(Distance, HeisenbergClosedFormMatchesShooting) {
    GroupSpec s = groups::N3();
    DistanceEngine fast(s, default_metric(s)), shoot(s, default_metric(s), shooting_only());
    for (int i = 0; i < 15; ++i) {
        CounterRng rng = make_rng(24, 0, static_cast<std::uint64_t>(i));
        GroupElement q = random_element(s, rng, 2.0);
        double a = fast.distance(identity(s), q), b = shoot.distance(identity(s), q);
        EXPECT_NEAR(a, b, 1e-5 * b) << q.coords.transpose();
    }
}

TEST(Distance, ConformalSemidirectMatchesShooting) {
    for (const GroupSpec& s : {groups::C(0.5), groups::C(2.0)}) {
        DistanceEngine fast(s, default_metric(s)), shoot(s, default_metric(s), shooting_only());
        for (int i = 0; i < 8; ++i) {
            CounterRng rng = make_rng(25, 0, static_cast<std::uint64_t>(i));
            GroupElement p = random_element(s, rng, 1.5), q = random_element(s, rng, 1.5);
            EXPECT_NEAR(fast.distance(p, q), shoot.distance(p, q), 1e-4 * fast.distance(p, q)) << to_string(s);
        }
    }
}

TEST(Distance, BoundsBracketTheEstimate) {
    for (const GroupSpec& s : testsupport::chartable_specs()) {
        if (to_string(s) == "A:[[1,2],[0,3]]") continue;
        DistanceEngine eng(s, default_metric(s));
        for (int i = 0; i < 5; ++i) {
            CounterRng rng = make_rng(26, 0, static_cast<std::uint64_t>(i));
            GroupElement p = random_element(s, rng), q = random_element(s, rng);
            double d = eng.distance(p, q);
            EXPECT_LE(eng.lower_bound(p, q), d * (1 + 1e-9) + 1e-12) << to_string(s);
            EXPECT_GE(eng.upper_bound(p, q), d * (1 - 1e-9) - 1e-12) << to_string(s);
        }
    }
}

TEST(Distance, SymmetricAndTriangle) {
    for (const GroupSpec& s : {groups::D(-1.0), groups::J(), groups::N3(), groups::SE2k(2), groups::AffRxT1()}) {
        DistanceEngine eng(s, default_metric(s));
        for (int i = 0; i < 6; ++i) {
            CounterRng rng = make_rng(27, 0, static_cast<std::uint64_t>(i));
            GroupElement p = random_element(s, rng), q = random_element(s, rng), r = random_element(s, rng);
            double pq = eng.distance(p, q), qp = eng.distance(q, p), qr = eng.distance(q, r), pr = eng.distance(p, r);
            EXPECT_NEAR(pq, qp, 0.02 * pq) << to_string(s);
            EXPECT_LE(pr, 1.02 * (pq + qr)) << to_string(s);
        }
    }
}

TEST(Distance, LeftInvariant) {
    for (const GroupSpec& s : {groups::D(-0.5), groups::N3(), groups::SU2()}) {
        DistanceEngine eng(s, default_metric(s));
        for (int i = 0; i < 5; ++i) {
            CounterRng rng = make_rng(28, 0, static_cast<std::uint64_t>(i));
            GroupElement g = random_element(s, rng), p = random_element(s, rng), q = random_element(s, rng);
            double d = eng.distance(p, q);
            EXPECT_NEAR(eng.distance(multiply(s, g, p), multiply(s, g, q)), d, 1e-4 * d) << to_string(s);
        }
    }
}

TEST(Distance, QuotientIsMinimumOverFiber) {
    GroupSpec cover = groups::N3(), base = groups::N3star();
    DistanceEngine ec(cover, default_metric(cover)), eb(base, default_metric(base));
    for (int i = 0; i < 10; ++i) {
        CounterRng rng = make_rng(29, 0, static_cast<std::uint64_t>(i));
        GroupElement p = random_element(cover, rng), q = random_element(cover, rng);
        double best = 1e300;
        for (int m = -15; m <= 15; ++m) best = std::min(best, ec.distance(p, multiply(cover, q, {0, 0, double(m)})));
        double d = eb.distance(covering_projection(cover, base, p), covering_projection(cover, base, q));
        EXPECT_LE(d, ec.distance(p, q) * (1 + 1e-9));
        EXPECT_NEAR(d, best, 0.05 * best);
    }
}

// Shortest paths on a grid from the identity; left-invariance moves each
// pair there.  Coarse spacing keeps this fast; the tight check is in the
// acceptance suite.
TEST(Distance, EpsilonNetOracle) {
    auto g_sol = [](const oracle::V3& p) {
        oracle::M3 g = oracle::M3::Zero();
        g(0, 0) = std::exp(-2 * p[2]);
        g(1, 1) = std::exp(2 * p[2]);
        g(2, 2) = 1;
        return g;
    };
    oracle::EpsNet net(-3, 3, 0.25, 3, g_sol);
    GroupSpec s = groups::D(-1.0);
    DistanceEngine eng(s, default_metric(s), shooting_only());
    std::vector<oracle::V3> targets;
    for (int i = 0; i < 12; ++i) {
        CounterRng rng = make_rng(30, 0, static_cast<std::uint64_t>(i));
        targets.push_back(net.snap({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}));
    }
    std::vector<double> d = net.distances({0, 0, 0}, targets);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        double lib = eng.distance(identity(s), {targets[i][0], targets[i][1], targets[i][2]});
        EXPECT_LE(lib, d[i] * (1 + 1e-9));
        EXPECT_GT(lib, d[i] * 0.92);
    }
}

TEST(Distance, UnchartedGroupsThrow) {
    EXPECT_THROW(DistanceEngine(groups::PSL2(1), FrameMetric::identity(3)), UnsupportedChart);
}

// ---------------------------------------------------------------------------
// Balls and growth

TEST(BallVolume, EuclideanUnitBall) {
    GroupSpec s = groups::R(3);
    BallVolumeReport r = ball_volume_report(s, default_metric(s), 1.0, 4000, 1);
    EXPECT_NEAR(r.volume, 4 * kPi / 3, 0.05 * 4 * kPi / 3);
    EXPECT_GT(r.stderr_, 0.0);
    EXPECT_FALSE(r.warning);
}

TEST(BallVolume, CompactGroupsSaturate) {
    GroupSpec t = groups::T(3);
    EXPECT_NEAR(ball_volume(t, default_metric(t), 5.0, 500, 2), 1.0, 1e-9);
    GroupSpec su = groups::SU2();
    EXPECT_NEAR(ball_volume(su, default_metric(su), 10.0, 500, 2), 2 * kPi * kPi, 1e-9);
}

TEST(BallVolume, HyperbolicSpaceBall) {
    GroupSpec s = groups::D(1.0);
    double r = 2.0, want = kPi * (std::sinh(2 * r) - 2 * r);
    EXPECT_NEAR(ball_volume(s, default_metric(s), r, 4000, 3), want, 0.06 * want);
}

TEST(BallVolume, HeisenbergDoublingRatio) {
    GroupSpec s = groups::N3();
    double v1 = ball_volume(s, default_metric(s), 6.0, 3000, 4), v2 = ball_volume(s, default_metric(s), 12.0, 3000, 5);
    EXPECT_NEAR(v2 / v1, 16.0, 2.5);
}

TEST(BallVolume, MonotoneInRadius) {
    GroupSpec s = groups::J();
    double prev = 0.0, prev_err = 0.0;
    for (double r : {0.5, 1.0, 1.5, 2.0}) {
        BallVolumeReport b = ball_volume_report(s, default_metric(s), r, 800, 6);
        EXPECT_GE(b.volume + 2 * b.stderr_ + 2 * prev_err, prev);
        prev = b.volume;
        prev_err = b.stderr_;
    }
}

TEST(BallVolume, Errors) {
    GroupSpec s = groups::R(3);
    EXPECT_THROW(ball_volume(s, default_metric(s), 1.0, 15, 0), InsufficientSamples);
    EXPECT_THROW(ball_volume(s, default_metric(s), 0.0, 100, 0), BadElement);
}

TEST(BallVolume, DeterministicGivenSeed) {
    GroupSpec s = groups::D(-1.0);
    EXPECT_EQ(ball_volume(s, default_metric(s), 2.0, 300, 9), ball_volume(s, default_metric(s), 2.0, 300, 9));
}

TEST(FitGrowth, SyntheticShapes) {
    std::vector<double> r{2, 3, 4, 5, 6}, cube, expo, errs(5, 0.0);
    for (double x : r) {
        cube.push_back(4.19 * x * x * x);
        expo.push_back(std::exp(2 * x));
    }
    GrowthReport a = fit_growth(r, cube, errs, 3);
    EXPECT_NEAR(a.exponent, 3.0, 1e-9);
    EXPECT_FALSE(a.classification.exponential);
    EXPECT_EQ(a.classification.degree, 3);
    GrowthReport b = fit_growth(r, expo, errs, 3);
    EXPECT_TRUE(b.classification.exponential);
    EXPECT_NEAR(b.rate, 2.0, 1e-9);
    EXPECT_THROW(fit_growth({1, 1.5, 2}, {1, 2, 3}, {0, 0, 0}, 3), InsufficientSamples);
}

TEST(GrowthExponent, Euclidean) {
    GroupSpec s = groups::R(3);
    GrowthReport g = growth_exponent(s, default_metric(s), {2, 3, 4, 5}, 600, 7);
    EXPECT_NEAR(g.exponent, 3.0, 0.4);
    EXPECT_FALSE(g.classification.exponential);
    for (std::size_t i = 1; i < g.volumes.size(); ++i) EXPECT_GE(g.volumes[i], g.volumes[i - 1]);
}

TEST(GrowthExponent, AffineGroupIsExponential) {
    GroupSpec s = groups::AffR();
    GrowthReport g = growth_exponent(s, default_metric(s), {2, 3, 4, 5, 6}, 600, 8);
    EXPECT_TRUE(g.classification.exponential);
    EXPECT_THROW(growth_exponent(s, default_metric(s), {2, 3}, 600, 8), InsufficientSamples);
}

TEST(GrowthType, AlgebraicTable) {
    EXPECT_EQ(growth_type_algebraic(groups::N3star()), (GrowthType{false, 2}));
    EXPECT_EQ(growth_type_algebraic(groups::SE2tilde()), (GrowthType{false, 3}));
    EXPECT_EQ(growth_type_algebraic(groups::N3()), (GrowthType{false, 4}));
    EXPECT_TRUE(growth_type_algebraic(groups::D(-1.0)).exponential);
    EXPECT_TRUE(growth_type_algebraic(groups::SL2tilde()).exponential);
    EXPECT_EQ(growth_type_algebraic(groups::SU2()), (GrowthType{false, 0}));
    Mat2 rot;
    rot << 0, -3, 3, 0;
    EXPECT_EQ(growth_type_algebraic(groups::semidirect(rot)), (GrowthType{false, 3}));
    Mat2 nil;
    nil << 0, 1, 0, 0;
    EXPECT_EQ(growth_type_algebraic(groups::semidirect(nil)), (GrowthType{false, 4}));
}
