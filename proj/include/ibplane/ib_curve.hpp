#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/ib_solver.hpp"
#include "ibplane/jacobi.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/parallel.hpp"
#include "ibplane/prob.hpp"

namespace ibplane {

struct CurvePoint {
    double beta = 0.0;
    double R = 0.0;
    double I_Y = 0.0;
    double D_IB = 0.0;
    double L = 0.0;
    std::size_t eff_card = 1;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct Bifurcation {
    double beta_low = 0.0;
    double beta_high = 0.0;
    std::size_t card_before = 1;
    std::size_t card_after = 1;
    std::optional<double> beta_predicted;  // absent when no cluster has an admissible mode

    friend bool operator==(const Bifurcation&, const Bifurcation&) = default;
};

/// An annealed information curve. `solutions` runs parallel to `points` when
/// the curve was computed in-process; it is empty for curves read from disk.
struct InfoCurve {
    std::vector<CurvePoint> points;
    std::vector<Bifurcation> bifurcations;
    std::vector<IBSolution> solutions;
};

struct CardinalityThresholds {
    double mass_eps = 1e-6;
    double merge_tau = 1e-4;  // Jensen-Shannon, bits
};

struct AnnealOptions {
    SolveOptions solve;
    double perturb_mag = 1e-3;
    std::size_t restarts = 4;  // fresh restarts per grid point and per bisection probe
    std::uint64_t seed = 0;
    CardinalityThresholds card;
    double bracket_rel_width = 1e-3;
    std::size_t threads = 1;
};

/// Jensen-Shannon divergence with equal weights, in bits.
inline double js_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("js_divergence: length mismatch");
    std::vector<double> m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
    return 0.5 * detail::kl(p, m) + 0.5 * detail::kl(q, m);
}

/// Number of clusters with p(t) > mass_eps after merging (transitively) the
/// pairs whose decoders are closer than merge_tau in JS divergence.
inline std::size_t effective_cardinality(const IBSolution& sol, double mass_eps = 1e-6, double merge_tau = 1e-4) {
    if (!(mass_eps > 0.0) || !(merge_tau > 0.0))
        throw ArgumentError("effective_cardinality: thresholds must be > 0");
    std::vector<std::size_t> alive;
    for (std::size_t t = 0; t < sol.marginal.size(); ++t)
        if (sol.marginal[t] > mass_eps) alive.push_back(t);
    std::vector<std::size_t> parent(alive.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    std::size_t groups = alive.size();
    for (std::size_t a = 0; a < alive.size(); ++a)
        for (std::size_t b = a + 1; b < alive.size(); ++b) {
            if (js_divergence(sol.decoder.row(alive[a]), sol.decoder.row(alive[b])) >= merge_tau) continue;
            const auto ra = find(a), rb = find(b);
            if (ra != rb) {
                parent[rb] = ra;
                --groups;
            }
        }
    return std::max<std::size_t>(groups, 1);
}

inline std::size_t effective_cardinality(const IBSolution& sol, const CardinalityThresholds& th) {
    return effective_cardinality(sol, th.mass_eps, th.merge_tau);
}

/// Geometric grid lo, lo*f, lo*f^2, ... with hi appended as the last point.
inline std::vector<double> geometric_grid(double lo, double hi, double factor = 1.05) {
    if (!(lo > 0.0) || !(hi >= lo) || !(factor > 1.0)) throw ArgumentError("geometric_grid: need 0 < lo <= hi, factor > 1");
    std::vector<double> g;
    for (double b = lo; b < hi * (1.0 - 1e-12); b *= factor) g.push_back(b);
    g.push_back(hi);
    return g;
}

namespace detail {

// p(x|t) for one cluster, from the encoder and p(x).
inline std::vector<double> posterior_x(const IBProblem& pb, const IBSolution& sol, std::size_t t) {
    if (t >= sol.encoder.t_card()) throw DimensionError("cluster index out of range");
    std::vector<double> w(pb.x_card());
    double mass = 0.0;
    for (std::size_t x = 0; x < pb.x_card(); ++x) {
        w[x] = pb.px[x] * sol.encoder(x, t);
        mass += w[x];
    }
    if (!(mass > 0.0)) throw DegenerateClusterError("cluster " + std::to_string(t) + " has zero mass");
    for (double& v : w) v /= mass;
    return w;
}

// M[y][y'] = sum_x p(x|t) p(y|x) p(y'|x) and the decoder d = p(y|t).
inline std::pair<Matrix, std::vector<double>> second_moments(const IBProblem& pb, const std::vector<double>& w) {
    const std::size_t yc = pb.y_card();
    Matrix m(yc, yc);
    std::vector<double> d(yc, 0.0);
    for (std::size_t x = 0; x < pb.x_card(); ++x) {
        if (w[x] == 0.0) continue;
        const auto row = pb.cond.row(x);
        for (std::size_t y = 0; y < yc; ++y) {
            d[y] += w[x] * row[y];
            for (std::size_t y2 = 0; y2 < yc; ++y2) m(y, y2) += w[x] * row[y] * row[y2];
        }
    }
    return {std::move(m), std::move(d)};
}

inline double second_eigenvalue(const IBProblem& pb, const IBSolution& sol, std::size_t t) {
    const auto w = posterior_x(pb, sol, t);
    auto [m, d] = second_moments(pb, w);
    std::vector<std::size_t> support;
    for (std::size_t y = 0; y < d.size(); ++y)
        if (d[y] > 0.0) support.push_back(y);
    const std::size_t k = support.size();
    // S = D^-1/2 M D^-1/2 shares its spectrum with C = D^-1 M. The trivial
    // mode of C (all-ones, eigenvalue 1) maps to v = sqrt(d); deflate it.
    Matrix s(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            const double da = d[support[a]], db = d[support[b]];
            s(a, b) = m(support[a], support[b]) / std::sqrt(da * db) - std::sqrt(da) * std::sqrt(db);
        }
    if (k == 0) return 0.0;
    return jacobi_eigen(std::move(s)).values.front();
}

}  // namespace detail

/// C[y][y'] = sum_x p(x|t) p(y|x) p(y'|x) / p(y|t), the second-order
/// correlation matrix of cluster t. Rows with p(y|t) = 0 are zero.
inline Matrix c_matrix(const JointDistribution& j, const IBSolution& sol, std::size_t t_index) {
    detail::IBProblem pb(j);
    detail::check_shapes(pb, sol.encoder);
    const auto w = detail::posterior_x(pb, sol, t_index);
    auto [m, d] = detail::second_moments(pb, w);
    for (std::size_t y = 0; y < m.rows(); ++y)
        for (std::size_t y2 = 0; y2 < m.cols(); ++y2) m(y, y2) = d[y] > 0.0 ? m(y, y2) / d[y] : 0.0;
    return m;
}

/// Largest eigenvalue of C for cluster t after removing the trivial mode.
inline double second_eigenvalue(const JointDistribution& j, const IBSolution& sol, std::size_t t_index) {
    detail::IBProblem pb(j);
    detail::check_shapes(pb, sol.encoder);
    return detail::second_eigenvalue(pb, sol, t_index);
}

/// Below this the admissible spectrum counts as empty.
inline constexpr double kSpectralFloor = 1e-12;

/// Critical beta 1/lambda_2 at which cluster t becomes unstable; +infinity
/// when lambda_2 <= 0 (no transition).
inline double critical_beta_spectral(const JointDistribution& j, const IBSolution& sol, std::size_t t_index) {
    const double lambda = second_eigenvalue(j, sol, t_index);
    return lambda > kSpectralFloor ? 1.0 / lambda : std::numeric_limits<double>::infinity();
}

namespace detail {

inline CurvePoint to_point(const IBSolution& s, const CardinalityThresholds& th) {
    return {s.beta, s.R, s.I_Y, s.D_IB, s.L, effective_cardinality(s, th)};
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Smallest predicted critical beta among the clusters with mass.
inline std::optional<double> predict_split(const JointDistribution& j, const IBSolution& sol,
                                           const CardinalityThresholds& th) {
    IBProblem pb(j);
    double best = 0.0;
    for (std::size_t t = 0; t < sol.marginal.size(); ++t) {
        if (sol.marginal[t] <= th.mass_eps) continue;
        best = std::max(best, second_eigenvalue(pb, sol, t));
    }
    if (best <= kSpectralFloor) return std::nullopt;
    return 1.0 / best;
}

}  // namespace detail

/// For each jump in eff_card between consecutive points, brackets the jump by
/// bisection (fresh restarts at every probe, so no warm-start hysteresis)
/// down to a width of opts.bracket_rel_width * beta_high, and attaches the
/// spectral prediction evaluated at the solution on the low side.
inline std::vector<Bifurcation> detect_bifurcations(const InfoCurve& curve, const JointDistribution& j,
                                                    std::size_t t_card, const AnnealOptions& opts = {}) {
    std::vector<Bifurcation> out;
    RestartOptions probe;
    probe.solve = opts.solve;
    probe.restarts = opts.restarts;
    probe.threads = opts.threads;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const auto& a = curve.points[i];
        const auto& b = curve.points[i + 1];
        if (b.eff_card <= a.eff_card) continue;

        double lo = a.beta, hi = b.beta;
        std::optional<IBSolution> low_sol;
        if (curve.solutions.size() == curve.points.size()) low_sol = curve.solutions[i];
        std::size_t step = 0;
        while (hi - lo > opts.bracket_rel_width * hi) {
            const double mid = 0.5 * (lo + hi);
            probe.seed = detail::mix_seed(opts.seed, 1000003 * (i + 1) + step++);
            auto s = ib_solve_best(j, t_card, mid, probe);
            if (effective_cardinality(s, opts.card) > a.eff_card) {
                hi = mid;
            } else {
                lo = mid;
                low_sol = std::move(s);
            }
        }
        if (!low_sol) {
            probe.seed = detail::mix_seed(opts.seed, 1000003 * (i + 1) + step);
            low_sol = ib_solve_best(j, t_card, lo, probe);
        }
        out.push_back({lo, hi, a.eff_card, b.eff_card, detail::predict_split(j, *low_sol, opts.card)});
    }
    return out;
}

/// Traces the curve over an increasing beta grid. Each point starts from
/// the previous solution with multiplicative noise (perturb_mag) and is
/// compared against opts.restarts fresh solves; the lower L is kept.
inline InfoCurve anneal_curve(const JointDistribution& j, std::size_t t_card, const std::vector<double>& beta_grid,
                              const AnnealOptions& opts = {}) {
    if (beta_grid.empty()) throw ArgumentError("anneal_curve: empty beta grid");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] > 0.0)) throw ArgumentError("anneal_curve: betas must be > 0");
        if (i > 0 && !(beta_grid[i] > beta_grid[i - 1])) throw ArgumentError("anneal_curve: grid must be strictly increasing");
    }
    if (t_card == 0) throw DimensionError("anneal_curve: t_card must be >= 1");

    InfoCurve curve;
    Encoder warm = uniform_encoder(j.x_card(), t_card, opts.seed, 1e-2);
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        const double beta = beta_grid[i];
        const std::uint64_t s = detail::mix_seed(opts.seed, i);
        const Encoder init = perturb_encoder(warm, opts.perturb_mag, s);
        IBSolution best = ib_solve(j, t_card, beta, init, opts.solve);
        if (opts.restarts > 0) {
            RestartOptions fresh;
            fresh.solve = opts.solve;
            fresh.restarts = opts.restarts;
            fresh.seed = detail::mix_seed(s, 7);
            fresh.threads = opts.threads;
            auto alt = ib_solve_best(j, t_card, beta, fresh);
            if (better_solution(alt, best)) best = std::move(alt);
        }
        warm = best.encoder;
        curve.points.push_back(detail::to_point(best, opts.card));
        curve.solutions.push_back(std::move(best));
    }
    curve.bifurcations = detect_bifurcations(curve, j, t_card, opts);
    return curve;
}

}  // namespace ibplane
