#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"

using namespace lieatlas;

namespace {

ClassLabel label(const char* s) { return classify(parse_spec(s)); }

RelationVerdict rel(const char* a, const char* b) { return strongest_relation(parse_spec(a), parse_spec(b)); }

}  // namespace

TEST(Classify, TableRows) {
    const std::map<std::string, int> want{
        {"T^1", 1},        {"T^3", 1},       {"SU2", 1},      {"SO3", 1},      {"R^1", 2},        {"RxT1", 2},
        {"RxT2", 2},       {"R^2", 3},       {"R2xT1", 3},    {"N3*", 3},      {"SE2:k=4", 3},    {"R^3", 4},
        {"SE2~", 4},       {"N3", 5},        {"SL2~", 6},     {"AffRxR", 6},   {"AffR", 8},       {"AffRxT1", 8},
        {"PSL2:k=3", 8},   {"J", 9},         {"C:lambda=3", 10}, {"D:lambda=1", 10}, {"D:lambda=-1", 7},
        {"D:lambda=0.7", 11}};
    for (const auto& [s, id] : want) EXPECT_EQ(label(s.c_str()).id, id) << s;
    EXPECT_EQ(label("D:lambda=0.7"), (ClassLabel{11, 0.7}));
    EXPECT_EQ(label("D:lambda=-0.25"), (ClassLabel{7, -0.25}));
    EXPECT_FALSE(label("C:lambda=3").param.has_value());
}

TEST(Classify, SemidirectMatricesReduce) {
    EXPECT_EQ(label("A:[[0,0],[0,0]]").id, 4);
    EXPECT_EQ(label("A:[[1,0],[0,0]]").id, 6);
    EXPECT_EQ(label("A:[[0,1],[0,0]]").id, 5);
    EXPECT_EQ(label("A:[[0,-2],[5,0]]").id, 4);  // purely imaginary spectrum
    EXPECT_EQ(label("A:[[2,0],[0,2]]").id, 10);
    EXPECT_EQ(label("A:[[3,1],[0,3]]").id, 9);
    EXPECT_EQ(label("A:[[4,0],[0,-2]]"), (ClassLabel{7, -0.5}));
    EXPECT_EQ(label("A:[[-2,0],[0,4]]"), (ClassLabel{7, -0.5}));
    EXPECT_EQ(label("A:[[1,2],[0,3]]"), (ClassLabel{11, 1.0 / 3.0}));
}

TEST(Classify, InvariantUnderScalingAndConjugation) {
    for (int i = 0; i < 200; ++i) {
        CounterRng rng = make_rng(51, 0, static_cast<std::uint64_t>(i));
        Mat2 A, P;
        A << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
        if (A.trace() <= 0) A = -A;
        if (A.determinant() <= 0 && A.trace() * A.trace() - 4 * A.determinant() >= 0) continue;
        P << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
        if (std::abs(P.determinant()) < 0.2) continue;
        ClassLabel c = classify(groups::semidirect(A));
        EXPECT_EQ(classify(groups::semidirect(3.7 * A)), c);
        EXPECT_EQ(classify(groups::semidirect(P * A * P.inverse())), c);
    }
}

TEST(Relation, Examples) {
    RelationVerdict v = rel("R^3", "SE2~");
    EXPECT_EQ(v.level, Level::MadeIsometric);
    EXPECT_EQ(v.citation, "Prop 2.2(1)");
    v = rel("PSL2:k=1", "PSL2:k=2");
    EXPECT_EQ(v.level, Level::BiLipschitz);
    EXPECT_EQ(v.citation, "Prop 2.7");
    v = rel("R2xT1", "N3*");
    EXPECT_EQ(v.level, Level::QIHomeomorphic);
    EXPECT_EQ(v.citation, "Prop 2.9(1)");
    EXPECT_EQ(rel("D:lambda=-1", "D:lambda=-0.5").level, Level::NotQI);
    v = rel("D:lambda=1", "C:lambda=2");
    EXPECT_EQ(v.level, Level::MadeIsometric);
    EXPECT_EQ(v.citation, "Prop 2.2(6)");
    EXPECT_EQ(rel("R^2", "R^3").level, Level::NotQI);
    EXPECT_EQ(rel("N3", "N3").level, Level::Isomorphic);
    EXPECT_EQ(rel("SU2", "T^3").level, Level::QI);
}

TEST(Relation, MadeIsometricIsNotTransitive) {
    EXPECT_EQ(rel("PSL2:k=1", "AffRxT1").level, Level::MadeIsometric);
    EXPECT_EQ(rel("PSL2:k=2", "AffRxT1").level, Level::MadeIsometric);
    EXPECT_EQ(rel("PSL2:k=1", "PSL2:k=2").level, Level::BiLipschitz);
    EXPECT_EQ(rel("PSL2:k=1", "AffRxT1").citation, "Prop 2.2(5)");
}

TEST(Relation, PartitionSoundness) {
    std::vector<GroupSpec> reps = representatives();
    reps.push_back(groups::D(-0.3));
    reps.push_back(groups::SE2k(5));
    reps.push_back(groups::semidirect((Mat2() << 1, 2, 0, 3).finished()));
    for (const auto& a : reps)
        for (const auto& b : reps) {
            bool qi = strongest_relation(a, b).level >= Level::QI;
            EXPECT_EQ(qi, classify(a) == classify(b)) << to_string(a) << " vs " << to_string(b);
        }
}

TEST(Relation, VerdictsDominateEncodedFacts) {
    std::vector<GroupSpec> reps = representatives();
    for (const auto& a : reps)
        for (const auto& b : reps) {
            if (same_spec(a, b)) continue;
            RelationVerdict v = strongest_relation(a, b);
            for (const auto& f : relation_facts()) {
                bool hit = (f.left(a) && f.right(b)) || (f.left(b) && f.right(a));
                if (hit) EXPECT_GE(v.level, f.level) << to_string(a) << " vs " << to_string(b) << " " << f.citation;
            }
            // Only encoded facts can produce MadeIsometric.
            if (v.level == Level::MadeIsometric) EXPECT_EQ(v.citation.rfind("Prop 2.2(", 0), 0u);
        }
}

TEST(Matrix, SymmetricWithIsomorphicDiagonal) {
    ClassificationMatrix m = classification_matrix();
    ASSERT_GE(m.names.size(), 25u);
    for (std::size_t i = 0; i < m.names.size(); ++i) {
        EXPECT_EQ(m.verdicts[i][i].level, Level::Isomorphic);
        for (std::size_t j = 0; j < m.names.size(); ++j) {
            EXPECT_EQ(m.verdicts[i][j].level, m.verdicts[j][i].level);
            EXPECT_EQ(m.verdicts[i][j].citation, m.verdicts[j][i].citation);
        }
    }
}

TEST(Matrix, PlaneRowAndCompactBlock) {
    ClassificationMatrix m = classification_matrix();
    auto idx = [&](const std::string& n) {
        return static_cast<std::size_t>(std::find(m.names.begin(), m.names.end(), n) - m.names.begin());
    };
    for (const char* n : {"R2xT1", "N3*", "SE2:k=1", "SE2:k=2"}) EXPECT_GE(m.verdicts[idx("R^2")][idx(n)].level, Level::QI) << n;
    for (const char* a : {"T^1", "T^2", "T^3", "SU2", "SO3"})
        for (const char* b : {"T^1", "T^2", "T^3", "SU2", "SO3"}) EXPECT_GE(m.verdicts[idx(a)][idx(b)].level, Level::QI);
}

TEST(Metadata, GrowthHyperbolicityBoundary) {
    EXPECT_EQ(class_metadata(8).boundary, "S1");
    for (int id : {9, 10, 11}) EXPECT_EQ(class_metadata(id).boundary, "S2");
    EXPECT_FALSE(class_metadata(7).hyperbolic);
    EXPECT_FALSE(class_metadata(5).hyperbolic);
    EXPECT_TRUE(class_metadata(10).hyperbolic);
    EXPECT_EQ(class_metadata(5).growth, (GrowthType{false, 4}));
    EXPECT_TRUE(class_metadata(6).growth.exponential);
}

TEST(Jordan, Examples) {
    EXPECT_TRUE(jordan_scaling_equivalent(Mat2::Identity(), 2 * Mat2::Identity()));
    Mat2 a, b, j;
    a << 1, 0, 0, 0.5;
    b << 1, 0, 0, 0.7;
    j << 1, 1, 0, 1;
    EXPECT_FALSE(jordan_scaling_equivalent(a, b));
    EXPECT_FALSE(jordan_scaling_equivalent(j, Mat2::Identity()));
    Mat2 bad;
    bad << 1, 0, 0, -1;
    EXPECT_THROW(jordan_scaling_equivalent(bad, Mat2::Identity()), NotApplicable);
}

TEST(Jordan, EquivalenceRelation) {
    std::vector<Mat2> ms;
    for (int i = 0; i < 30; ++i) {
        CounterRng rng = make_rng(52, 0, static_cast<std::uint64_t>(i));
        Mat2 D = Mat2::Zero();
        // Diagonal entries from a small set so that equivalent pairs occur.
        const double vals[] = {0.5, 1.0, 2.0};
        D(0, 0) = vals[rng() % 3];
        D(1, 1) = vals[rng() % 3];
        if (i % 4 == 0) D(0, 1) = 1.0, D(1, 1) = D(0, 0);
        Mat2 P;
        P << 1, rng.uniform(-1, 1), rng.uniform(-1, 1), 1;
        if (std::abs(P.determinant()) < 0.3) P = Mat2::Identity();
        ms.push_back(rng.uniform(0.5, 3.0) * P * D * P.inverse());
    }
    for (const auto& a : ms) {
        EXPECT_TRUE(jordan_scaling_equivalent(a, a));
        for (const auto& b : ms) {
            EXPECT_EQ(jordan_scaling_equivalent(a, b), jordan_scaling_equivalent(b, a));
            for (const auto& c : ms)
                if (jordan_scaling_equivalent(a, b) && jordan_scaling_equivalent(b, c))
                    EXPECT_TRUE(jordan_scaling_equivalent(a, c));
        }
    }
}

TEST(Sol, Identification) {
    EXPECT_TRUE(same_spec(sol_identification(1, 1), groups::D(-1.0)));
    EXPECT_TRUE(same_spec(sol_identification(1, 0.5), groups::D(-0.5)));
    EXPECT_TRUE(same_spec(sol_identification(2, 1), groups::D(-0.5)));
    EXPECT_THROW(sol_identification(1, 0), NotApplicable);
}
