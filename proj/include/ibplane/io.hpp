#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibplane/error.hpp"
#include "ibplane/ib_curve.hpp"
#include "ibplane/ib_solver.hpp"
#include "ibplane/layer_analyzer.hpp"
#include "ibplane/mlp.hpp"
#include "ibplane/prob.hpp"
#include "ibplane/sample_bounds.hpp"

namespace ibplane::io {

using nlohmann::json;

/// 17 significant digits: enough for an exact double round trip.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw FormatError("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

template <typename Fn>
auto guard(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw FormatError(std::string("unexpected JSON shape: ") + e.what());
    }
}

// ---- JSON ------------------------------------------------------------------

inline json to_json(const JointDistribution& j) {
    return {{"x_card", j.x_card()}, {"y_card", j.y_card()}, {"p", j.matrix().to_rows()}};
}

inline JointDistribution joint_from_json(const json& v) {
    return guard([&] {
        const auto rows = v.at("p").get<std::vector<std::vector<double>>>();
        if (rows.size() != v.at("x_card").get<std::size_t>() ||
            (!rows.empty() && rows.front().size() != v.at("y_card").get<std::size_t>()))
            throw FormatError("joint: x_card/y_card disagree with p");
        return JointDistribution::from_rows(rows);
    });
}

inline json to_json(const IBSolution& s) {
    return {{"beta", s.beta},
            {"R", s.R},
            {"I_Y", s.I_Y},
            {"D_IB", s.D_IB},
            {"L", s.L},
            {"converged", s.converged},
            {"iterations", s.iterations},
            {"encoder", s.encoder.matrix().to_rows()},
            {"decoder", s.decoder.matrix().to_rows()},
            {"marginal", s.marginal.vec()}};
}

inline IBSolution solution_from_json(const json& v) {
    return guard([&] {
        IBSolution s;
        s.beta = v.at("beta").get<double>();
        s.R = v.at("R").get<double>();
        s.I_Y = v.at("I_Y").get<double>();
        s.D_IB = v.at("D_IB").get<double>();
        s.L = v.at("L").get<double>();
        s.converged = v.at("converged").get<bool>();
        s.iterations = v.at("iterations").get<std::size_t>();
        s.encoder = Encoder(Matrix::from_rows(v.at("encoder").get<std::vector<std::vector<double>>>()));
        s.decoder = ConditionalMatrix(Matrix::from_rows(v.at("decoder").get<std::vector<std::vector<double>>>()));
        s.marginal = DiscreteDistribution(v.at("marginal").get<std::vector<double>>());
        return s;
    });
}

inline json to_json(const NetworkParams& net) {
    json w = json::array();
    for (const auto& m : net.weights) w.push_back(m.to_rows());
    return {{"layer_sizes", net.layer_sizes}, {"weights", w}, {"biases", net.biases}};
}

inline NetworkParams network_from_json(const json& v) {
    return guard([&] {
        NetworkParams net;
        net.layer_sizes = v.at("layer_sizes").get<std::vector<std::size_t>>();
        for (const auto& m : v.at("weights")) net.weights.push_back(Matrix::from_rows(m.get<std::vector<std::vector<double>>>()));
        net.biases = v.at("biases").get<std::vector<std::vector<double>>>();
        validate_network(net);
        return net;
    });
}

inline json to_json(const std::vector<Bifurcation>& bifs) {
    json out = json::array();
    for (const auto& b : bifs) {
        out.push_back({{"beta_low", b.beta_low},
                       {"beta_high", b.beta_high},
                       {"card_before", b.card_before},
                       {"card_after", b.card_after},
                       {"beta_predicted", b.beta_predicted ? json(*b.beta_predicted) : json(nullptr)}});
    }
    return out;
}

inline std::vector<Bifurcation> bifurcations_from_json(const json& v) {
    return guard([&] {
        std::vector<Bifurcation> out;
        for (const auto& e : v) {
            Bifurcation b;
            b.beta_low = e.at("beta_low").get<double>();
            b.beta_high = e.at("beta_high").get<double>();
            b.card_before = e.at("card_before").get<std::size_t>();
            b.card_after = e.at("card_after").get<std::size_t>();
            if (!e.at("beta_predicted").is_null()) b.beta_predicted = e.at("beta_predicted").get<double>();
            out.push_back(b);
        }
        return out;
    });
}

inline json gaps_to_json(const NetworkGaps& g, const BoundCurve& b) {
    return {{"R_N", g.R_N},         {"D_N", g.D_N},       {"delta_G", g.delta_G},
            {"delta_C", g.delta_C}, {"R_star", b.R_star}, {"D_star", b.D_star},
            {"n", static_cast<std::uint64_t>(b.n)},       {"c_bound", b.c_bound}};
}

// ---- CSV -------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty CSV, expected header '" + header + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw FormatError("CSV header '" + line + "' != '" + header + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline double to_real(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw FormatError("bad real '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw FormatError("bad real '" + s + "'");
    }
}

inline std::size_t to_index(const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size() || v < 0) throw FormatError("bad index '" + s + "'");
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw FormatError("bad index '" + s + "'");
    }
}

inline void expect_width(const std::vector<std::string>& row, std::size_t n) {
    if (row.size() != n) throw FormatError("CSV row has " + std::to_string(row.size()) + " fields, expected " + std::to_string(n));
}

}  // namespace detail

inline constexpr const char* kSampleHeader = "x,y";
inline constexpr const char* kCurveHeader = "beta,R,I_Y,D_IB,L,eff_card";
inline constexpr const char* kBoundHeader = "R_hat,I_Y_hat,I_Y_worst,D_worst";
inline constexpr const char* kLossHeader = "epoch,loss";
inline constexpr const char* kPlaneHeader = "layer,I_X,I_Y,criterion";

inline std::string samples_csv(const SampleSet& s) {
    std::string out = std::string(kSampleHeader) + "\n";
    for (auto [x, y] : s.pairs) out += std::to_string(x) + "," + std::to_string(y) + "\n";
    return out;
}

inline SampleSet samples_from_csv(const std::string& text) {
    SampleSet s;
    for (const auto& r : detail::parse_csv(text, kSampleHeader)) {
        detail::expect_width(r, 2);
        s.pairs.emplace_back(detail::to_index(r[0]), detail::to_index(r[1]));
    }
    return s;
}

inline std::string curve_csv(const std::vector<CurvePoint>& pts) {
    std::string out = std::string(kCurveHeader) + "\n";
    for (const auto& p : pts)
        out += format_real(p.beta) + "," + format_real(p.R) + "," + format_real(p.I_Y) + "," + format_real(p.D_IB) + "," +
               format_real(p.L) + "," + std::to_string(p.eff_card) + "\n";
    return out;
}

inline std::vector<CurvePoint> curve_from_csv(const std::string& text) {
    std::vector<CurvePoint> pts;
    for (const auto& r : detail::parse_csv(text, kCurveHeader)) {
        detail::expect_width(r, 6);
        pts.push_back({detail::to_real(r[0]), detail::to_real(r[1]), detail::to_real(r[2]), detail::to_real(r[3]),
                       detail::to_real(r[4]), detail::to_index(r[5])});
    }
    return pts;
}

inline std::string bound_csv(const BoundCurve& b) {
    std::string out = std::string(kBoundHeader) + "\n";
    for (const auto& p : b.points)
        out += format_real(p.R_hat) + "," + format_real(p.I_Y_hat) + "," + format_real(p.I_Y_worst) + "," +
               format_real(p.D_worst) + "\n";
    return out;
}

/// Reads the four CSV columns back; n, c_bound and the optimum are not in
/// the file.
inline std::vector<BoundPoint> bound_points_from_csv(const std::string& text) {
    std::vector<BoundPoint> pts;
    for (const auto& r : detail::parse_csv(text, kBoundHeader)) {
        detail::expect_width(r, 4);
        BoundPoint p;
        p.R_hat = detail::to_real(r[0]);
        p.I_Y_hat = detail::to_real(r[1]);
        p.I_Y_worst = detail::to_real(r[2]);
        p.D_worst = detail::to_real(r[3]);
        pts.push_back(p);
    }
    return pts;
}

inline std::string loss_csv(const std::vector<double>& losses) {
    std::string out = std::string(kLossHeader) + "\n";
    for (std::size_t e = 0; e < losses.size(); ++e) out += std::to_string(e) + "," + format_real(losses[e]) + "\n";
    return out;
}

inline std::vector<double> losses_from_csv(const std::string& text) {
    std::vector<double> out;
    for (const auto& r : detail::parse_csv(text, kLossHeader)) {
        detail::expect_width(r, 2);
        out.push_back(detail::to_real(r[1]));
    }
    return out;
}

inline std::string plane_csv(const LayerPath& path) {
    std::string out = std::string(kPlaneHeader) + "\n";
    for (const auto& p : path.points)
        out += std::to_string(p.layer_index) + "," + format_real(p.I_X) + "," + format_real(p.I_Y) + "," +
               format_real(p.layer_criterion) + "\n";
    return out;
}

inline std::vector<InfoPlanePoint> plane_from_csv(const std::string& text) {
    std::vector<InfoPlanePoint> out;
    for (const auto& r : detail::parse_csv(text, kPlaneHeader)) {
        detail::expect_width(r, 4);
        out.push_back({detail::to_index(r[0]), detail::to_real(r[1]), detail::to_real(r[2]), detail::to_real(r[3])});
    }
    return out;
}

}  // namespace ibplane::io
