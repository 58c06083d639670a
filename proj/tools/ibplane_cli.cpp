// ibplane: command-line front end for the information-bottleneck toolkit.
//
// Every subcommand writes its declared outputs atomically and prints a
// one-line JSON summary on stdout. Exit status: 0 success, 2 argument
// errors, 1 computation errors (error name on stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ibplane/ibplane.hpp"
#include "ibplane/io.hpp"
#include "ibplane/svg.hpp"

using namespace ibplane;
using nlohmann::json;

namespace {

struct CurveArgs {
    std::string joint;
    std::size_t t_card = 0;
    double beta_min = 0.1;
    double beta_max = 50.0;
    double grid_factor = 1.05;
    double perturb = 1e-3;
    std::size_t restarts = 4;
    double tol = 1e-8;
    std::size_t max_iter = 10000;
    std::uint64_t seed = 0;
    double mass_eps = 1e-6;
    double merge_tau = 1e-4;
};

void add_curve_options(CLI::App* cmd, CurveArgs& a) {
    cmd->add_option("--joint", a.joint, "joint distribution JSON")->required();
    cmd->add_option("--t-card", a.t_card, "cluster alphabet size (default x_card)");
    cmd->add_option("--beta-min", a.beta_min, "smallest beta")->check(CLI::PositiveNumber);
    cmd->add_option("--beta-max", a.beta_max, "largest beta")->check(CLI::PositiveNumber);
    cmd->add_option("--grid-factor", a.grid_factor, "geometric grid ratio")->check(CLI::Range(1.0 + 1e-9, 100.0));
    cmd->add_option("--perturb", a.perturb, "warm-start noise magnitude")->check(CLI::NonNegativeNumber);
    cmd->add_option("--restarts", a.restarts, "fresh restarts per beta");
    cmd->add_option("--tol", a.tol, "encoder convergence threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", a.max_iter, "iteration cap per solve");
    cmd->add_option("--seed", a.seed, "random seed");
    cmd->add_option("--mass-eps", a.mass_eps, "cluster mass floor")->check(CLI::PositiveNumber);
    cmd->add_option("--merge-tau", a.merge_tau, "JS merge threshold (bits)")->check(CLI::PositiveNumber);
}

JointDistribution load_joint(const std::string& path) { return io::joint_from_json(io::parse_json(io::read_file(path))); }

NetworkParams load_network(const std::string& path) { return io::network_from_json(io::parse_json(io::read_file(path))); }

InfoCurve run_curve(const CurveArgs& a, const JointDistribution& j) {
    if (a.beta_max < a.beta_min) throw ArgumentError("--beta-max must be >= --beta-min");
    AnnealOptions o;
    o.solve = {a.tol, a.max_iter};
    o.perturb_mag = a.perturb;
    o.restarts = a.restarts;
    o.seed = a.seed;
    o.card = {a.mass_eps, a.merge_tau};
    o.threads = threads_from_env();
    return anneal_curve(j, a.t_card ? a.t_card : j.x_card(), geometric_grid(a.beta_min, a.beta_max, a.grid_factor), o);
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            const long v = std::stol(tok);
            if (v <= 0) throw ArgumentError("layer sizes must be positive");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw ArgumentError("bad layer size '" + tok + "'");
        }
    }
    return out;
}

void emit(const json& summary) { std::cout << summary.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information bottleneck curves, phase transitions and information-plane analysis"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "write a preset joint distribution");
    std::string preset, out;
    PresetParams pp;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::string samples_out;
    bool empirical = false;
    gen->add_option("--preset", preset, "symmetric|product|deterministic|hierarchical|random|xor")->required();
    gen->add_option("--eps", pp.eps, "symmetric flip probability");
    gen->add_option("--eps1", pp.eps1, "hierarchical coarse flip probability");
    gen->add_option("--eps2", pp.eps2, "hierarchical fine flip probability");
    gen->add_option("--levels", pp.levels, "hierarchical depth");
    gen->add_option("--k", pp.k, "deterministic alphabet size");
    gen->add_option("--x-card", pp.x_card, "random/product X size");
    gen->add_option("--y-card", pp.y_card, "random/product Y size");
    gen->add_option("--d", pp.d, "xor bit count");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--samples", n_samples, "draw this many (x,y) pairs");
    gen->add_option("--samples-out", samples_out, "sample CSV path");
    gen->add_flag("--empirical", empirical, "write the empirical joint of the drawn samples to --out");
    gen->add_option("--out", out, "joint JSON path")->required();

    // ib-solve
    auto* solve = app.add_subcommand("ib-solve", "solve at a single beta");
    std::string joint_path;
    std::size_t t_card = 0, restarts = 20, max_iter = 10000;
    double beta = 1.0, tol = 1e-8;
    solve->add_option("--joint", joint_path, "joint distribution JSON")->required();
    solve->add_option("--t-card", t_card, "cluster alphabet size (default x_card)");
    solve->add_option("--beta", beta, "tradeoff parameter")->required()->check(CLI::NonNegativeNumber);
    solve->add_option("--tol", tol, "encoder convergence threshold")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", max_iter, "iteration cap");
    solve->add_option("--restarts", restarts, "seeded restarts");
    solve->add_option("--seed", seed, "random seed");
    solve->add_option("--out", out, "solution JSON path")->required();

    // ib-curve / bifurcations
    CurveArgs curve_args;
    std::string bif_out;
    auto* curve = app.add_subcommand("ib-curve", "anneal the information curve");
    add_curve_options(curve, curve_args);
    curve->add_option("--out", out, "curve CSV path")->required();
    curve->add_option("--bifurcations-out", bif_out, "bifurcation JSON path");
    auto* bifs = app.add_subcommand("bifurcations", "detect phase transitions along the curve");
    add_curve_options(bifs, curve_args);
    bifs->add_option("--out", out, "bifurcation JSON path")->required();

    // bounds
    auto* bounds = app.add_subcommand("bounds", "finite-sample worst-case curve and network gaps");
    std::string curve_path, net_path, gaps_out;
    double n_bound = 0, c_bound = 1.0;
    bounds->add_option("--curve", curve_path, "curve CSV")->required();
    bounds->add_option("--joint", joint_path, "joint the curve was computed on")->required();
    bounds->add_option("--n", n_bound, "sample size")->required()->check(CLI::Range(1.0, 1e300));
    bounds->add_option("--c-bound", c_bound, "bound constant")->check(CLI::NonNegativeNumber);
    bounds->add_option("--net", net_path, "trained network JSON (for gaps)");
    bounds->add_option("--gaps-out", gaps_out, "gaps JSON path");
    bounds->add_option("--out", out, "bound curve CSV path")->required();

    // train
    auto* train = app.add_subcommand("train", "train a sigmoidal network by SGD");
    std::string hidden = "8,4", samples_in, loss_out;
    TrainConfig cfg;
    std::size_t n_train = 1000;
    train->add_option("--joint", joint_path, "joint distribution JSON")->required();
    train->add_option("--samples", samples_in, "sample CSV (default: draw --n pairs from the joint)");
    train->add_option("--n", n_train, "pairs to draw when --samples is absent");
    train->add_option("--hidden", hidden, "comma-separated hidden layer widths");
    train->add_option("--lr", cfg.learning_rate, "learning rate")->check(CLI::PositiveNumber);
    train->add_option("--epochs", cfg.epochs, "epochs");
    train->add_option("--batch-size", cfg.batch_size, "mini-batch size")->check(CLI::PositiveNumber);
    train->add_option("--noise", cfg.hidden_noise, "hidden pre-activation noise during training")->check(CLI::NonNegativeNumber);
    train->add_option("--seed", seed, "random seed");
    train->add_option("--loss-out", loss_out, "loss trace CSV path");
    train->add_option("--samples-out", samples_out, "write the training pairs as CSV");
    train->add_option("--out", out, "network JSON path")->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "place a network's layers on the information plane");
    std::size_t bins = 8;
    bool exact = false;
    double sweep_min = 0.1, sweep_max = 0.0, sweep_factor = 1.5;
    analyze->add_option("--joint", joint_path, "joint distribution JSON")->required();
    analyze->add_option("--net", net_path, "network JSON")->required();
    analyze->add_option("--bins", bins, "bins per unit")->check(CLI::Range(2, 1 << 20));
    analyze->add_flag("--exact", exact, "use exact activation tuples instead of bins");
    analyze->add_option("--beta", beta, "beta for the per-layer criterion")->check(CLI::NonNegativeNumber);
    analyze->add_option("--sweep-min", sweep_min, "criterion sweep start")->check(CLI::PositiveNumber);
    analyze->add_option("--sweep-max", sweep_max, "criterion sweep end (0 disables the sweep)")->check(CLI::NonNegativeNumber);
    analyze->add_option("--sweep-factor", sweep_factor, "criterion sweep ratio")->check(CLI::Range(1.0 + 1e-9, 100.0));
    analyze->add_option("--out", out, "info-plane CSV path")->required();

    // plane
    auto* plane = app.add_subcommand("plane", "draw curve, bound and layer path as SVG");
    std::string bounds_path;
    plane->add_option("--joint", joint_path, "joint distribution JSON")->required();
    plane->add_option("--net", net_path, "network JSON")->required();
    plane->add_option("--curve", curve_path, "curve CSV")->required();
    plane->add_option("--bounds", bounds_path, "bound curve CSV")->required();
    plane->add_option("--bins", bins, "bins per unit")->check(CLI::Range(2, 1 << 20));
    plane->add_flag("--exact", exact, "use exact activation tuples instead of bins");
    plane->add_option("--out", out, "SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            auto j = gen_preset(preset, pp, seed);
            json summary{{"command", "gen"}, {"preset", preset}};
            if (n_samples > 0) {
                auto s = sample_pairs(j, n_samples, seed);
                if (!samples_out.empty()) io::write_file_atomic(samples_out, io::samples_csv(s));
                if (empirical) j = empirical_joint(s, j.x_card(), j.y_card());
                summary["samples"] = n_samples;
            } else if (empirical || !samples_out.empty()) {
                throw ArgumentError("--empirical and --samples-out need --samples N");
            }
            io::write_file_atomic(out, io::to_json(j).dump() + "\n");
            summary["x_card"] = j.x_card();
            summary["y_card"] = j.y_card();
            summary["I_XY"] = mutual_information(j);
            summary["out"] = out;
            emit(summary);
        } else if (*solve) {
            const auto j = load_joint(joint_path);
            RestartOptions o;
            o.solve = {tol, max_iter};
            o.restarts = restarts;
            o.seed = seed;
            o.threads = threads_from_env();
            const auto s = ib_solve_best(j, t_card ? t_card : j.x_card(), beta, o);
            io::write_file_atomic(out, io::to_json(s).dump() + "\n");
            emit({{"command", "ib-solve"}, {"beta", s.beta},   {"R", s.R},
                  {"I_Y", s.I_Y},          {"D_IB", s.D_IB},   {"L", s.L},
                  {"converged", s.converged}, {"eff_card", effective_cardinality(s)}, {"out", out}});
        } else if (*curve || *bifs) {
            const auto j = load_joint(curve_args.joint);
            const auto c = run_curve(curve_args, j);
            if (*curve) {
                io::write_file_atomic(out, io::curve_csv(c.points));
                if (!bif_out.empty()) io::write_file_atomic(bif_out, io::to_json(c.bifurcations).dump() + "\n");
            } else {
                io::write_file_atomic(out, io::to_json(c.bifurcations).dump() + "\n");
            }
            emit({{"command", *curve ? "ib-curve" : "bifurcations"},
                  {"points", c.points.size()},
                  {"bifurcations", io::to_json(c.bifurcations)},
                  {"I_XY", mutual_information(j)},
                  {"out", out}});
        } else if (*bounds) {
            const auto j = load_joint(joint_path);
            const auto pts = io::curve_from_csv(io::read_file(curve_path));
            const auto b = bound_curve(pts, j.y_card(), n_bound, c_bound);
            io::write_file_atomic(out, io::bound_csv(b));
            json summary{{"command", "bounds"}, {"n", n_bound}, {"c_bound", c_bound},
                         {"R_star", b.R_star},  {"D_star", b.D_star}, {"out", out}};
            if (!net_path.empty()) {
                const auto dr = network_distortion_rate(j, load_network(net_path));
                const auto g = network_gaps(b, dr.R_N, dr.D_N);
                const auto gj = io::gaps_to_json(g, b);
                if (!gaps_out.empty()) io::write_file_atomic(gaps_out, gj.dump() + "\n");
                summary["gaps"] = gj;
            } else if (!gaps_out.empty()) {
                throw ArgumentError("--gaps-out needs --net");
            }
            emit(summary);
        } else if (*train) {
            const auto j = load_joint(joint_path);
            const SampleSet s = samples_in.empty() ? sample_pairs(j, n_train, seed)
                                                   : io::samples_from_csv(io::read_file(samples_in));
            std::vector<std::size_t> sizes{j.x_card()};
            for (auto h : parse_sizes(hidden)) sizes.push_back(h);
            sizes.push_back(j.y_card());
            cfg.seed = seed;
            auto res = train_sgd(init_network(sizes, seed), s, cfg);
            io::write_file_atomic(out, io::to_json(res.net).dump() + "\n");
            if (!loss_out.empty()) io::write_file_atomic(loss_out, io::loss_csv(res.losses));
            if (!samples_out.empty()) io::write_file_atomic(samples_out, io::samples_csv(s));
            const auto dr = network_distortion_rate(j, res.net);
            emit({{"command", "train"},
                  {"layer_sizes", sizes},
                  {"samples", s.n()},
                  {"final_loss", res.losses.empty() ? json(nullptr) : json(res.losses.back())},
                  {"R_N", dr.R_N},
                  {"D_N", dr.D_N},
                  {"out", out}});
        } else if (*analyze) {
            const auto j = load_joint(joint_path);
            const auto net = load_network(net_path);
            const QuantizerConfig q{bins, exact};
            const auto codes = network_codes(j, net, q);
            const auto path = path_from_codes(j, codes, beta);
            io::write_file_atomic(out, io::plane_csv(path));
            const auto dr = network_distortion_rate(j, net);
            json violations = json::array();
            for (const auto& v : path.dpi_violations)
                violations.push_back({{"from", v.from}, {"to", v.to}, {"magnitude", v.magnitude}});
            json summary{{"command", "analyze"}, {"layers", path.points.size()}, {"R_N", dr.R_N},
                         {"D_N", dr.D_N},        {"dpi_violations", violations}, {"out", out}};
            if (sweep_max > 0) {
                json sweep = json::array();
                for (const auto& a : sweep_layer_criterion(j, codes, geometric_grid(sweep_min, std::max(sweep_min, sweep_max), sweep_factor)))
                    sweep.push_back({{"beta", a.beta}, {"layer", a.best_layer}, {"criterion", a.criterion}});
                summary["layer_sweep"] = sweep;
            }
            emit(summary);
        } else if (*plane) {
            const auto j = load_joint(joint_path);
            const auto net = load_network(net_path);
            const auto pts = io::curve_from_csv(io::read_file(curve_path));
            const auto bpts = io::bound_points_from_csv(io::read_file(bounds_path));
            const auto path = info_plane_path(j, net, {bins, exact});

            svg::Series ib{"IB curve", {}, "#000000"};
            for (const auto& p : pts) ib.points.emplace_back(p.R, p.I_Y);
            svg::Series worst{"worst-case bound", {}, "#cc2222", true, false, true};
            for (const auto& p : bpts) worst.points.emplace_back(p.R_hat, p.I_Y_worst);
            svg::Series layers{"network layers", {}, "#22aa22", true, true};
            for (const auto& p : path.points) layers.points.emplace_back(p.I_X, p.I_Y);
            io::write_file_atomic(out, svg::render({"Information plane", "I(X;T) [bits]", "I(T;Y) [bits]"}, {ib, worst, layers}));
            emit({{"command", "plane"}, {"series", 3}, {"layers", path.points.size()}, {"out", out}});
        }
    } catch (const ArgumentError& e) {
        std::cerr << e.name() << ": " << e.what() << std::endl;
        return 2;
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal-error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
