#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ibplane/ib_curve.hpp"
#include "ibplane/presets.hpp"

using namespace ibplane;

namespace {

IBSolution trivial_solution(const JointDistribution& j, std::size_t t_card) {
    Matrix m(j.x_card(), t_card, 1.0 / static_cast<double>(t_card));
    return evaluate_encoder(j, Encoder(m), 0.0);
}

IBSolution identity_solution(const JointDistribution& j) {
    Matrix m(j.x_card(), j.x_card());
    for (std::size_t x = 0; x < j.x_card(); ++x) m(x, x) = 1.0;
    return evaluate_encoder(j, Encoder(m), 1.0);
}

// Second eigenvalue of the non-symmetric C by a general eigen-solver.
double second_eigenvalue_general(const Matrix& c) {
    const std::size_t n = c.rows();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = c(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.rbegin(), ev.rend());
    return ev.size() > 1 ? ev[1] : 0.0;
}

AnnealOptions fast_options() {
    AnnealOptions o;
    o.restarts = 2;
    return o;
}

}  // namespace

TEST(EffectiveCardinality, Examples) {
    auto sym = presets::symmetric(0.2);
    EXPECT_EQ(effective_cardinality(trivial_solution(sym, 3)), 1u);
    auto j = presets::random(5, 3, 4);
    EXPECT_EQ(effective_cardinality(identity_solution(j)), 5u);
    auto s = ib_solve(sym, 2, 3.0, uniform_encoder(2, 2, 0));
    EXPECT_EQ(effective_cardinality(s), 2u);
    EXPECT_THROW(effective_cardinality(s, 0.0, 1e-4), ArgumentError);
}

TEST(EffectiveCardinality, DeadClustersAreIgnored) {
    auto j = presets::deterministic(3);
    auto s = evaluate_encoder(j, Encoder(Matrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 1, 0}})), 1.0);
    EXPECT_EQ(effective_cardinality(s), 2u);
}

TEST(CMatrix, Examples) {
    auto det = presets::deterministic(2);
    auto c = c_matrix(det, trivial_solution(det, 2), 0);
    EXPECT_NEAR(c(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(c(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(c(1, 1), 1.0, 1e-15);

    auto sym = presets::symmetric(0.2);
    auto cs = c_matrix(sym, trivial_solution(sym, 2), 1);
    EXPECT_NEAR(cs(0, 0), 0.68, 1e-15);
    EXPECT_NEAR(cs(0, 1), 0.32, 1e-15);
    EXPECT_NEAR(cs(1, 0), 0.32, 1e-15);
    EXPECT_NEAR(cs(1, 1), 0.68, 1e-15);
}

TEST(CMatrix, OnesVectorIsFixed) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto j = presets::random(4, 3, seed);
        auto s = ib_solve(j, 3, 3.0, random_encoder(4, 3, seed));
        for (std::size_t t = 0; t < 3; ++t) {
            if (s.marginal[t] <= 0) continue;
            auto c = c_matrix(j, s, t);
            for (std::size_t y = 0; y < 3; ++y) {
                double row = 0;
                for (std::size_t y2 = 0; y2 < 3; ++y2) row += c(y, y2);
                EXPECT_NEAR(row, 1.0, 1e-12);
            }
        }
    }
}

TEST(CMatrix, ZeroMassClusterThrows) {
    auto j = presets::deterministic(2);
    auto s = evaluate_encoder(j, Encoder(Matrix::from_rows({{1, 0}, {1, 0}})), 1.0);
    EXPECT_THROW(c_matrix(j, s, 1), DegenerateClusterError);
    EXPECT_THROW(c_matrix(j, s, 2), DimensionError);
}

TEST(CriticalBeta, Examples) {
    auto sym = presets::symmetric(0.2);
    auto ts = trivial_solution(sym, 2);
    EXPECT_NEAR(second_eigenvalue(sym, ts, 0), 0.36, 1e-14);
    EXPECT_NEAR(critical_beta_spectral(sym, ts, 0), 1.0 / 0.36, 1e-12);

    auto prod = presets::product(3, 2);
    EXPECT_TRUE(std::isinf(critical_beta_spectral(prod, trivial_solution(prod, 2), 0)));

    auto det = presets::deterministic(2);
    EXPECT_NEAR(critical_beta_spectral(det, trivial_solution(det, 2), 0), 1.0, 1e-14);
}

TEST(CriticalBeta, DeflatedSpectrumMatchesGeneralEigenSolver) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto j = presets::random(3 + seed % 4, 2 + seed % 4, seed);
        auto s = ib_solve(j, 3, 2.0 + seed % 5, random_encoder(j.x_card(), 3, seed));
        for (std::size_t t = 0; t < 3; ++t) {
            if (s.marginal[t] < 1e-9) continue;
            auto c = c_matrix(j, s, t);
            EXPECT_NEAR(second_eigenvalue(j, s, t), second_eigenvalue_general(c), 1e-9) << seed;
        }
    }
}

TEST(GeometricGrid, EndpointsAndSpacing) {
    auto g = geometric_grid(0.1, 50, 1.05);
    EXPECT_DOUBLE_EQ(g.front(), 0.1);
    EXPECT_DOUBLE_EQ(g.back(), 50.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
    EXPECT_THROW(geometric_grid(0, 1), ArgumentError);
    EXPECT_THROW(geometric_grid(1, 2, 1.0), ArgumentError);
}

TEST(AnnealCurve, BelowCriticalEverythingIsTrivial) {
    for (const auto& name : preset_names()) {
        auto j = gen_preset(name, {}, 2);
        auto lambda = second_eigenvalue(j, trivial_solution(j, 2), 0);
        ASSERT_TRUE(lambda < 1.0 / 1.0 + 1e-12) << name;
        auto c = anneal_curve(j, j.x_card(), {0.1, 0.5, 1.0 - 1e-3}, fast_options());
        for (const auto& p : c.points) {
            if (p.beta * lambda >= 1.0) continue;
            EXPECT_EQ(p.eff_card, 1u) << name << " beta " << p.beta;
            EXPECT_LT(p.I_Y, 1e-6) << name;
        }
    }
}

TEST(AnnealCurve, SymmetricJointSplitsOnce) {
    auto sym = presets::symmetric(0.2);
    auto c = anneal_curve(sym, 2, geometric_grid(0.1, 50), fast_options());
    ASSERT_EQ(c.bifurcations.size(), 1u);
    const auto& b = c.bifurcations.front();
    EXPECT_EQ(b.card_before, 1u);
    EXPECT_EQ(b.card_after, 2u);
    EXPECT_LE(b.beta_high - b.beta_low, 1e-3 * b.beta_high);
    ASSERT_TRUE(b.beta_predicted.has_value());
    const double mid = 0.5 * (b.beta_low + b.beta_high);
    EXPECT_LT(std::abs(*b.beta_predicted - mid) / mid, 0.05);
}

TEST(AnnealCurve, MonotoneBoundedAndSlopeConsistent) {
    for (const auto& name : preset_names()) {
        auto j = gen_preset(name, {}, 5);
        auto c = anneal_curve(j, j.x_card(), geometric_grid(0.1, 50), fast_options());
        const double mi = mutual_information(j);
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            const auto& p = c.points[i];
            EXPECT_LE(p.I_Y, mi + 1e-9) << name;
            EXPECT_LE(p.eff_card, j.x_card());
            if (i == 0) continue;
            const auto& q = c.points[i - 1];
            EXPECT_GT(p.beta, q.beta);
            EXPECT_GE(p.R, q.R - 1e-6) << name << " at " << p.beta;
            EXPECT_GE(p.I_Y, q.I_Y - 1e-6) << name << " at " << p.beta;
            const double dr = p.R - q.R;
            if (dr > 1e-4) {
                const double slope = (p.I_Y - q.I_Y) / dr;
                EXPECT_LE(slope, 1.0 / q.beta * 1.05) << name << " at " << p.beta;
                EXPECT_GE(slope, 1.0 / p.beta * 0.95) << name << " at " << p.beta;
            }
        }
    }
}

TEST(AnnealCurve, RejectsBadGrids) {
    auto sym = presets::symmetric(0.2);
    EXPECT_THROW(anneal_curve(sym, 2, {}), ArgumentError);
    EXPECT_THROW(anneal_curve(sym, 2, {1.0, 1.0}), ArgumentError);
    EXPECT_THROW(anneal_curve(sym, 2, {0.0, 1.0}), ArgumentError);
}

TEST(DetectBifurcations, ConstantCardinalityGivesNone) {
    InfoCurve c;
    for (double b : {1.0, 2.0, 3.0}) c.points.push_back({b, 0, 0, 0, 0, 1});
    EXPECT_TRUE(detect_bifurcations(c, presets::product(2, 2), 2).empty());
}

TEST(DetectBifurcations, HierarchicalJointSplitsTwiceInOrder) {
    auto h = presets::hierarchical(0.05, 0.2, 2);
    auto c = anneal_curve(h, 4, geometric_grid(0.5, 20), fast_options());
    ASSERT_EQ(c.bifurcations.size(), 2u);
    EXPECT_LT(c.bifurcations[0].beta_high, c.bifurcations[1].beta_low);
    EXPECT_EQ(c.bifurcations[0].card_before, 1u);
    EXPECT_EQ(c.bifurcations[0].card_after, 2u);
    EXPECT_EQ(c.bifurcations[1].card_before, 2u);
    EXPECT_EQ(c.bifurcations[1].card_after, 4u);
    // Top bit flips with 0.05, lower bit with 0.2.
    EXPECT_NEAR(*c.bifurcations[0].beta_predicted, 1.0 / (0.9 * 0.9), 1e-6);
    const double mid = 0.5 * (c.bifurcations[1].beta_low + c.bifurcations[1].beta_high);
    EXPECT_LT(std::abs(*c.bifurcations[1].beta_predicted - mid) / mid, 0.05);
}

TEST(DetectBifurcations, CurveWithoutSolutionsStillRefines) {
    auto sym = presets::symmetric(0.2);
    auto c = anneal_curve(sym, 2, geometric_grid(1, 10, 1.2), fast_options());
    c.solutions.clear();
    auto bifs = detect_bifurcations(c, sym, 2, fast_options());
    ASSERT_EQ(bifs.size(), 1u);
    // Just past the transition the split is below the merge threshold, so the
    // bracket can sit slightly above the critical value.
    const double mid = 0.5 * (bifs[0].beta_low + bifs[0].beta_high);
    EXPECT_LT(std::abs(mid - 1 / 0.36) / (1 / 0.36), 0.01);
    EXPECT_LE(bifs[0].beta_high - bifs[0].beta_low, 1e-3 * bifs[0].beta_high * (1 + 1e-12));
}
