#include <gtest/gtest.h>

#include <filesystem>

#include "ibplane/io.hpp"
#include "ibplane/presets.hpp"
#include "ibplane/svg.hpp"

using namespace ibplane;

TEST(Io, JointJsonRoundTripAndSchema) {
    auto j = presets::random(3, 4, 9);
    auto v = io::to_json(j);
    EXPECT_EQ(v.at("x_card"), 3);
    EXPECT_EQ(v.at("y_card"), 4);
    EXPECT_EQ(io::joint_from_json(io::parse_json(v.dump())), j);
    EXPECT_THROW(io::joint_from_json(io::parse_json(R"({"x_card":2,"y_card":2,"p":[[1,0]]})")), FormatError);
    EXPECT_THROW(io::joint_from_json(io::parse_json(R"({"p":[[1]]})")), FormatError);
    EXPECT_THROW(io::parse_json("{nope"), FormatError);
}

TEST(Io, SolutionNetworkBifurcationRoundTrip) {
    auto j = presets::random(3, 2, 1);
    auto s = ib_solve(j, 2, 4.0, uniform_encoder(3, 2, 1));
    auto back = io::solution_from_json(io::parse_json(io::to_json(s).dump()));
    EXPECT_EQ(back.encoder, s.encoder);
    EXPECT_EQ(back.decoder, s.decoder);
    EXPECT_EQ(back.marginal, s.marginal);
    EXPECT_EQ(back.L, s.L);
    EXPECT_EQ(back.iterations, s.iterations);

    auto net = init_network({3, 4, 2}, 5);
    EXPECT_EQ(io::network_from_json(io::parse_json(io::to_json(net).dump())), net);

    std::vector<Bifurcation> bifs{{1.0, 1.001, 1, 2, 1.0004}, {3.0, 3.003, 2, 4, std::nullopt}};
    auto text = io::to_json(bifs).dump();
    EXPECT_NE(text.find("null"), std::string::npos);
    EXPECT_EQ(io::bifurcations_from_json(io::parse_json(text)), bifs);
}

TEST(Io, CsvRoundTrips) {
    auto samples = sample_pairs(presets::random(3, 3, 1), 50, 2);
    EXPECT_EQ(io::samples_from_csv(io::samples_csv(samples)), samples);

    auto curve = anneal_curve(presets::symmetric(0.2), 2, geometric_grid(1, 5, 1.3)).points;
    EXPECT_EQ(io::curve_from_csv(io::curve_csv(curve)), curve);

    auto b = bound_curve(curve, 2, 1000);
    EXPECT_EQ(io::bound_points_from_csv(io::bound_csv(b)).size(), b.points.size());
    auto pts = io::bound_points_from_csv(io::bound_csv(b));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(pts[i].R_hat, b.points[i].R_hat);
        EXPECT_EQ(pts[i].D_worst, b.points[i].D_worst);
    }

    std::vector<double> losses{0.7, 0.1 / 3, 1e-300};
    EXPECT_EQ(io::losses_from_csv(io::loss_csv(losses)), losses);
    EXPECT_EQ(io::format_real(0.1), "0.10000000000000001");
}

TEST(Io, CsvErrors) {
    EXPECT_THROW(io::samples_from_csv("a,b\n0,1\n"), FormatError);
    EXPECT_THROW(io::samples_from_csv("x,y\n0\n"), FormatError);
    EXPECT_THROW(io::samples_from_csv("x,y\n0,-1\n"), FormatError);
    EXPECT_THROW(io::curve_from_csv("beta,R,I_Y,D_IB,L,eff_card\n1,2,3,4,five,1\n"), FormatError);
    EXPECT_THROW(io::samples_from_csv(""), FormatError);
}

TEST(Io, AtomicWriteReplacesTarget) {
    const auto dir = std::filesystem::temp_directory_path() / "ibplane_io_test";
    std::filesystem::create_directories(dir);
    const auto f = dir / "out.txt";
    io::write_file_atomic(f, "first");
    io::write_file_atomic(f, "second");
    EXPECT_EQ(io::read_file(f), "second");
    EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    EXPECT_THROW(io::read_file(dir / "missing"), FormatError);
    std::filesystem::remove_all(dir);
}

TEST(Svg, SeriesLabelsAndEscaping) {
    svg::Series a{"IB curve", {{0, 0}, {1, 0.5}}, "#000"};
    svg::Series b{"bound <n>", {{0, 0}, {1, 0.3}}, "#c00", true, false, true};
    svg::Series c{"layers", {{1, 0.5}, {0.5, 0.4}}, "#0a0", true, true};
    auto out = svg::render({"plane", "I(X;T)", "I(T;Y)"}, {a, b, c});
    EXPECT_EQ(out.rfind("<svg", 0), 0u);
    EXPECT_NE(out.find("data-label=\"IB curve\""), std::string::npos);
    EXPECT_NE(out.find("bound &lt;n&gt;"), std::string::npos);
    EXPECT_NE(out.find("<circle"), std::string::npos);
    EXPECT_NE(out.find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(out.find("</svg>"), std::string::npos);
}
