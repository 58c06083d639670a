#include <gtest/gtest.h>

#include <cmath>

#include "ibplane/layer_analyzer.hpp"
#include "ibplane/presets.hpp"

using namespace ibplane;

namespace {

NetworkParams trained_net(const JointDistribution& j, std::vector<std::size_t> sizes, std::uint64_t seed,
                          std::size_t epochs = 300) {
    auto samples = sample_pairs(j, 1000, seed);
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return train_sgd(init_network(sizes, seed), samples, cfg).net;
}

}  // namespace

TEST(Quantize, BinsAndCodes) {
    EXPECT_EQ(bin_of(0.49, 2), 0u);
    EXPECT_EQ(bin_of(0.51, 2), 1u);
    EXPECT_EQ(bin_of(1.0, 8), 7u);
    EXPECT_EQ(bin_of(0.0, 8), 0u);

    std::vector<LayerActivations> acts(4);
    acts[0].hidden = {{0.1, 0.9}};
    acts[1].hidden = {{0.1, 0.9}};
    acts[2].hidden = {{0.12, 0.91}};
    acts[3].hidden = {{0.7, 0.2}};
    auto codes = quantize_activations(acts, {8, false});
    EXPECT_EQ(codes[0], (LayerCodes{0, 0, 0, 1}));
    auto exact = quantize_activations(acts, {8, true});
    EXPECT_EQ(exact[0], (LayerCodes{0, 0, 1, 2}));
    EXPECT_THROW(quantize_activations(acts, {1, false}), ArgumentError);
}

TEST(Quantize, ProductBoundOnDistinctCodes) {
    std::vector<LayerActivations> acts;
    Rng rng(3);
    for (int i = 0; i < 5000; ++i) acts.push_back({{{rng.uniform01(), rng.uniform01()}}, {1.0}});
    auto codes = quantize_activations(acts, {8, false});
    std::size_t top = 0;
    for (auto c : codes[0]) top = std::max(top, c);
    EXPECT_LT(top, 64u);
}

TEST(LayerMutualInformation, Examples) {
    auto j = presets::random(5, 3, 2);
    auto constant = layer_mutual_information(j, LayerCodes(5, 0));
    EXPECT_EQ(constant.I_X, 0.0);
    EXPECT_EQ(constant.I_Y, 0.0);
    auto lossless = layer_mutual_information(j, identity_codes(5));
    EXPECT_NEAR(lossless.I_X, entropy(j.px()), 1e-12);
    EXPECT_NEAR(lossless.I_Y, mutual_information(j), 1e-12);

    // Symbols 0 and 3 share p(y|x); merging them keeps all of I(X;Y).
    auto m = JointDistribution::from_rows({{0.1, 0.05}, {0.2, 0.05}, {0.05, 0.25}, {0.2, 0.1}});
    auto merged = layer_mutual_information(m, {0, 1, 2, 0});
    EXPECT_NEAR(merged.I_Y, mutual_information(m), 1e-12);
    EXPECT_LT(merged.I_X, entropy(m.px()));
}

TEST(LayerMutualInformation, CoverageErrors) {
    auto j = JointDistribution::from_rows({{0.5, 0}, {0, 0.5}, {0, 0}});
    EXPECT_THROW(layer_mutual_information(j, {0, 1}), CoverageError);
    EXPECT_THROW(layer_mutual_information(j, {0, kNoCode, 1}), CoverageError);
    EXPECT_NO_THROW(layer_mutual_information(j, {0, 1, kNoCode}));
}

TEST(InfoPlanePath, ZeroNetworkCollapses) {
    auto j = presets::random(4, 2, 1);
    auto n = init_network({4, 3, 3, 2}, 1);
    for (auto& w : n.weights)
        for (double& v : w.data()) v = 0;
    auto path = info_plane_path(j, n, {});
    ASSERT_EQ(path.points.size(), 4u);
    EXPECT_NEAR(path.points[0].I_X, entropy(j.px()), 1e-12);
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_EQ(path.points[i].I_X, 0.0);
        EXPECT_EQ(path.points[i].I_Y, 0.0);
    }
}

TEST(InfoPlanePath, InjectiveLayerSitsAtInputPoint) {
    auto j = presets::random(4, 3, 5);
    NetworkParams n;
    n.layer_sizes = {4, 1, 3};
    // One unit, distinct activations far enough apart for 4 bins.
    n.weights = {Matrix::from_rows({{-3, -0.5, 0.5, 3}}), Matrix(3, 1)};
    n.biases = {{0}, {0, 0, 0}};
    auto path = info_plane_path(j, n, {4, false});
    EXPECT_NEAR(path.points[1].I_X, entropy(j.px()), 1e-12);
    EXPECT_NEAR(path.points[1].I_Y, mutual_information(j), 1e-12);
    EXPECT_NEAR(path.points[1].layer_criterion, entropy(j.px()), 1e-12);
}

TEST(InfoPlanePath, TrainedNetworkObeysDpi) {
    auto j = presets::symmetric(0.2);
    auto n = trained_net(j, {2, 4, 3, 2}, 3);
    auto path = info_plane_path(j, n, {8, false}, 2.0);
    for (std::size_t i = 0; i + 1 < path.points.size(); ++i)
        EXPECT_LE(path.points[i + 1].I_Y, path.points[i].I_Y + 1e-9);
    EXPECT_TRUE(dpi_check(path).empty());
}

TEST(DpiCheck, FlagsIncreasesWithMagnitude) {
    LayerPath p;
    p.points = {{0, 2, 1, 0}, {1, 1, 0.5, 0}, {2, 1, 0.7, 0}, {3, 0.5, 0.4, 0}};
    auto v = dpi_check(p);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].from, 1u);
    EXPECT_EQ(v[0].to, 2u);
    EXPECT_NEAR(v[0].magnitude, 0.2, 1e-15);
    p.points.erase(p.points.begin() + 2);
    EXPECT_TRUE(dpi_check(p).empty());
}

TEST(DpiCheck, CoarseBinsCanViolateButExactCodesNever) {
    // h2 is a function of h1's exact values, but binning h1 coarsely can
    // merge inputs that h2 still separates.
    auto j = JointDistribution::from_rows({{0.25, 0.0}, {0.0, 0.25}, {0.25, 0.0}, {0.0, 0.25}});
    std::vector<LayerCodes> coarse{identity_codes(4), {0, 0, 1, 1}, {0, 1, 0, 1}};
    auto p = path_from_codes(j, coarse, 1.0);
    auto v = dpi_check(p);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NEAR(v[0].magnitude, 1.0, 1e-12);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto rj = presets::random(6, 3, seed);
        auto net = init_network({6, 5, 4, 3, 3}, seed);
        auto codes = network_codes(rj, net, {0, true});
        auto path = path_from_codes(rj, codes, 1.0);
        EXPECT_TRUE(path.dpi_violations.empty());
        for (std::size_t i = 0; i + 1 < path.points.size(); ++i)
            EXPECT_LE(path.points[i + 1].I_X, path.points[i].I_X + 1e-12);
    }
}

TEST(Estimators, SandwichAndRefinement) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto j = presets::random(12, 3, seed);
        auto net = init_network({12, 3, 2, 3}, seed + 50);
        for (auto& w : net.weights)
            for (double& v : w.data()) v *= 6;
        auto exact = network_codes(j, net, {0, true});
        const double hx = entropy(j.px());
        for (std::size_t bins = 2; bins <= 32; bins *= 2) {
            auto coarse = network_codes(j, net, {bins, false});
            auto fine = network_codes(j, net, {bins * 2, false});
            for (std::size_t l = 1; l + 1 < exact.size(); ++l) {
                const auto c = layer_mutual_information(j, coarse[l]);
                const auto f = layer_mutual_information(j, fine[l]);
                const auto e = layer_mutual_information(j, exact[l]);
                EXPECT_LE(c.I_X, e.I_X + 1e-9);
                EXPECT_LE(e.I_X, hx + 1e-9);
                EXPECT_GE(f.I_X, c.I_X - 1e-9);
                EXPECT_GE(f.I_Y, c.I_Y - 1e-9);
            }
        }
    }
}

TEST(NetworkDistortionRate, Examples) {
    auto det = presets::deterministic(2);
    NetworkParams perfect;
    perfect.layer_sizes = {2, 2};
    perfect.weights = {Matrix::from_rows({{5, -5}, {-5, 5}})};
    perfect.biases = {{0, 0}};
    auto dr = network_distortion_rate(det, perfect);
    EXPECT_NEAR(dr.R_N, 1.0, 1e-12);
    EXPECT_NEAR(dr.D_N, 0.0, 1e-12);

    auto j = presets::random(4, 3, 1);
    auto constant = init_network({4, 3}, 1);
    for (double& v : constant.weights[0].data()) v = 0;
    auto c = network_distortion_rate(j, constant);
    EXPECT_EQ(c.R_N, 0.0);
    EXPECT_NEAR(c.D_N, mutual_information(j), 1e-12);
}

TEST(LayerCriterion, SweepPicksMinimizingLayer) {
    auto j = presets::random(4, 2, 3);
    std::vector<LayerCodes> codes{identity_codes(4), identity_codes(4), {0, 0, 1, 1}, {0, 0, 0, 0}};
    // beta = 0: the criterion is the layer's own rate given its input; the
    // constant layer is free.
    auto a = sweep_layer_criterion(j, codes, {0.0, 1000.0});
    EXPECT_EQ(a[0].best_layer, 3u);
    EXPECT_NEAR(a[0].criterion, 0.0, 1e-12);
    // Large beta punishes any lost relevance; the copy layer loses none but
    // pays H(X), layer 2 pays I(Y;X|h2) * beta.
    EXPECT_GE(a[1].criterion, 0.0);
}
