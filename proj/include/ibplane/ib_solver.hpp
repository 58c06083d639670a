#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/parallel.hpp"
#include "ibplane/prob.hpp"
#include "ibplane/random.hpp"

namespace ibplane {

/// Soft assignment p(t|x): x_card rows, t_card columns.
class Encoder {
public:
    Encoder() = default;
    explicit Encoder(ConditionalMatrix p) : p_(std::move(p)) {}
    explicit Encoder(Matrix m) : p_(std::move(m)) {}

    std::size_t x_card() const noexcept { return p_.rows(); }
    std::size_t t_card() const noexcept { return p_.cols(); }
    double operator()(std::size_t x, std::size_t t) const { return p_(x, t); }
    const ConditionalMatrix& conditional() const noexcept { return p_; }
    const Matrix& matrix() const noexcept { return p_.matrix(); }

    friend bool operator==(const Encoder&, const Encoder&) = default;

private:
    ConditionalMatrix p_;
};

struct IBSolution {
    double beta = 0.0;
    Encoder encoder;
    ConditionalMatrix decoder;  // p(y|t)
    DiscreteDistribution marginal;  // p(t)
    double R = 0.0;     // I(X;T)
    double I_Y = 0.0;   // I(T;Y)
    double D_IB = 0.0;  // E[KL(p(y|x) || p(y|t))] = I(X;Y|T)
    double L = 0.0;     // R - beta * I_Y
    std::size_t iterations = 0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-8;
    std::size_t max_iter = 10000;
};

/// Restart policy for ib_solve_best. Restart 0 starts from the near-uniform
/// encoder; the rest start from seeded Dirichlet(1) rows.
struct RestartOptions {
    SolveOptions solve;
    std::size_t restarts = 20;
    std::uint64_t seed = 0;
    double init_noise = 1e-2;
    std::size_t threads = 1;
};

namespace detail {

inline double kl_nats(std::span<const double> p, std::span<const double> q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
        d += p[i] * std::log(p[i] / q[i]);
    }
    return d < 0.0 ? 0.0 : d;
}

// Quantities of p(x,y) reused by every iteration.
struct IBProblem {
    explicit IBProblem(const JointDistribution& j)
        : joint(j.matrix()), py(col_sums(j.matrix())), mi(mutual_information(j.matrix())) {
        auto d = decompose(j);
        px = d.px.vec();
        cond = d.py_given_x.matrix();
    }

    std::size_t x_card() const { return joint.rows(); }
    std::size_t y_card() const { return joint.cols(); }

    Matrix joint;
    std::vector<double> px;
    Matrix cond;
    std::vector<double> py;
    double mi;
};

struct Clusters {
    std::vector<double> marginal;
    Matrix decoder;
};

// p(t) = sum_x p(x) p(t|x);  p(y|t) = sum_x p(y|x) p(x|t). Empty clusters
// get p(y) as decoder; their weight in the encoder update is zero anyway.
inline Clusters cluster_statistics(const IBProblem& pb, const Matrix& enc) {
    const std::size_t tc = enc.cols();
    Clusters c{std::vector<double>(tc, 0.0), Matrix(tc, pb.y_card())};
    for (std::size_t x = 0; x < pb.x_card(); ++x)
        for (std::size_t t = 0; t < tc; ++t) {
            const double w = pb.px[x] * enc(x, t);
            c.marginal[t] += w;
            if (w == 0.0) continue;
            for (std::size_t y = 0; y < pb.y_card(); ++y) c.decoder(t, y) += w * pb.cond(x, y);
        }
    for (std::size_t t = 0; t < tc; ++t) {
        if (c.marginal[t] > 0.0) {
            double s = 0.0;
            for (double v : c.decoder.row(t)) s += v;
            for (double& v : c.decoder.row(t)) v /= s;
        } else {
            std::copy(pb.py.begin(), pb.py.end(), c.decoder.row(t).begin());
        }
    }
    return c;
}

// p(t|x) = p(t) exp(-beta KL[p(y|x) || p(y|t)]) / Z(x; beta), in log space
// with the row maximum subtracted.
inline Matrix encoder_update(const IBProblem& pb, const std::vector<double>& marginal,
                             const Matrix& decoder, double beta) {
    const std::size_t tc = marginal.size();
    Matrix out(pb.x_card(), tc);
    std::vector<double> logw(tc);
    for (std::size_t x = 0; x < pb.x_card(); ++x) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < tc; ++t) {
            if (marginal[t] <= 0.0) {
                logw[t] = -std::numeric_limits<double>::infinity();
                continue;
            }
            double penalty = 0.0;
            if (beta != 0.0) {
                const double d = kl_nats(pb.cond.row(x), decoder.row(t));
                penalty = std::isinf(d) ? std::numeric_limits<double>::infinity() : beta * d;
            }
            logw[t] = std::log(marginal[t]) - penalty;
            top = std::max(top, logw[t]);
        }
        if (!std::isfinite(top))
            throw DegenerateEncoderError("partition function Z(x;beta) vanishes for x=" + std::to_string(x));
        double z = 0.0;
        for (std::size_t t = 0; t < tc; ++t) {
            const double w = std::isfinite(logw[t]) ? std::exp(logw[t] - top) : 0.0;
            out(x, t) = w;
            z += w;
        }
        for (double& v : out.row(x)) v /= z;
    }
    return out;
}

inline IBSolution evaluate(const IBProblem& pb, Matrix enc, double beta) {
    const auto c = cluster_statistics(pb, enc);
    const std::size_t tc = enc.cols();
    Matrix xt(pb.x_card(), tc);
    Matrix ty(tc, pb.y_card());
    double distortion = 0.0;
    for (std::size_t x = 0; x < pb.x_card(); ++x)
        for (std::size_t t = 0; t < tc; ++t) {
            const double w = pb.px[x] * enc(x, t);
            xt(x, t) = w;
            if (w == 0.0) continue;
            distortion += w * kl(pb.cond.row(x), c.decoder.row(t));
            for (std::size_t y = 0; y < pb.y_card(); ++y) ty(t, y) += enc(x, t) * pb.joint(x, y);
        }
    IBSolution s;
    s.beta = beta;
    s.R = mutual_information(xt);
    s.I_Y = mutual_information(ty);
    s.D_IB = distortion;
    s.L = s.R - beta * s.I_Y;
    s.encoder = Encoder(std::move(enc));
    s.decoder = ConditionalMatrix(c.decoder);
    double total = 0.0;
    for (double m : c.marginal) total += m;
    auto marg = c.marginal;
    for (double& m : marg) m /= total;
    s.marginal = DiscreteDistribution(std::move(marg));
    return s;
}

inline void check_shapes(const IBProblem& pb, const Encoder& e) {
    if (e.x_card() != pb.x_card()) throw DimensionError("encoder rows do not match x_card");
    if (e.t_card() == 0) throw DimensionError("t_card must be >= 1");
}

}  // namespace detail

/// Near-uniform encoder with multiplicative noise of the given magnitude.
inline Encoder uniform_encoder(std::size_t x_card, std::size_t t_card, std::uint64_t seed,
                               double noise = 1e-2) {
    if (x_card == 0 || t_card == 0) throw DimensionError("uniform_encoder: empty alphabet");
    Rng rng(seed);
    Matrix m(x_card, t_card);
    for (std::size_t x = 0; x < x_card; ++x) {
        double s = 0.0;
        for (double& v : m.row(x)) {
            v = 1.0 + noise * rng.uniform(-1.0, 1.0);
            s += v;
        }
        for (double& v : m.row(x)) v /= s;
    }
    return Encoder(std::move(m));
}

/// Encoder with independent flat-Dirichlet rows.
inline Encoder random_encoder(std::size_t x_card, std::size_t t_card, std::uint64_t seed) {
    if (x_card == 0 || t_card == 0) throw DimensionError("random_encoder: empty alphabet");
    Rng rng(seed);
    Matrix m(x_card, t_card);
    for (std::size_t x = 0; x < x_card; ++x) {
        double s = 0.0;
        for (double& v : m.row(x)) {
            v = rng.exponential();
            s += v;
        }
        for (double& v : m.row(x)) v /= s;
    }
    return Encoder(std::move(m));
}

/// Multiplies every entry by (1 + magnitude * u), u ~ U[-1, 1], and
/// renormalizes the rows. Used to break symmetry between annealing steps.
inline Encoder perturb_encoder(const Encoder& e, double magnitude, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m = e.matrix();
    for (std::size_t x = 0; x < m.rows(); ++x) {
        double s = 0.0;
        for (double& v : m.row(x)) {
            v *= 1.0 + magnitude * rng.uniform(-1.0, 1.0);
            s += v;
        }
        for (double& v : m.row(x)) v /= s;
    }
    return Encoder(std::move(m));
}

/// All scalars of an encoder at the given beta, without iterating.
inline IBSolution evaluate_encoder(const JointDistribution& j, const Encoder& e, double beta) {
    detail::IBProblem pb(j);
    detail::check_shapes(pb, e);
    return detail::evaluate(pb, e.matrix(), beta);
}

/// One round of the self-consistent equations.
inline Encoder ib_iterate_once(const JointDistribution& j, const Encoder& e, double beta) {
    detail::IBProblem pb(j);
    detail::check_shapes(pb, e);
    const auto c = detail::cluster_statistics(pb, e.matrix());
    return Encoder(detail::encoder_update(pb, c.marginal, c.decoder, beta));
}

/// Iterates the self-consistent equations from `init` until the max-abs
/// encoder change drops below opts.tol or opts.max_iter rounds have run.
/// Local solver: the problem is not convex.
inline IBSolution ib_solve(const JointDistribution& j, std::size_t t_card, double beta, const Encoder& init,
                           SolveOptions opts = {}) {
    if (t_card == 0) throw DimensionError("ib_solve: t_card must be >= 1");
    if (!(opts.tol > 0.0)) throw ArgumentError("ib_solve: tol must be > 0");
    if (beta < 0.0 || !std::isfinite(beta)) throw ArgumentError("ib_solve: beta must be finite and >= 0");
    detail::IBProblem pb(j);
    detail::check_shapes(pb, init);
    if (init.t_card() != t_card) throw DimensionError("ib_solve: init encoder has wrong t_card");

    Matrix enc = init.matrix();
    std::size_t it = 0;
    bool converged = false;
    while (it < opts.max_iter) {
        const auto c = detail::cluster_statistics(pb, enc);
        Matrix next = detail::encoder_update(pb, c.marginal, c.decoder, beta);
        const double change = max_abs_diff(next, enc);
        enc = std::move(next);
        ++it;
        if (change < opts.tol) {
            converged = true;
            break;
        }
    }
    auto s = detail::evaluate(pb, std::move(enc), beta);
    s.iterations = it;
    s.converged = converged;
    return s;
}

/// Lower L wins; within 1e-12 the smaller rate wins.
inline bool better_solution(const IBSolution& a, const IBSolution& b) {
    if (a.L < b.L - 1e-12) return true;
    if (b.L < a.L - 1e-12) return false;
    return a.R < b.R;
}

/// Best of opts.restarts independent solves.
inline IBSolution ib_solve_best(const JointDistribution& j, std::size_t t_card, double beta,
                                const RestartOptions& opts = {}) {
    const std::size_t n = std::max<std::size_t>(opts.restarts, 1);
    std::vector<std::optional<IBSolution>> results(n);
    parallel_for(n, opts.threads, [&](std::size_t k) {
        const Encoder init = k == 0 ? uniform_encoder(j.x_card(), t_card, opts.seed, opts.init_noise)
                                    : random_encoder(j.x_card(), t_card, opts.seed + k);
        results[k] = ib_solve(j, t_card, beta, init, opts.solve);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (better_solution(*results[k], *results[best])) best = k;
    return std::move(*results[best]);
}

/// Max-abs discrepancy between the stored encoder, marginal and decoder and
/// their recomputation from the self-consistent equations.
inline double self_consistency_residual(const JointDistribution& j, const IBSolution& sol) {
    detail::IBProblem pb(j);
    detail::check_shapes(pb, sol.encoder);
    const std::size_t tc = sol.encoder.t_card();
    if (sol.marginal.size() != tc || sol.decoder.rows() != tc || sol.decoder.cols() != j.y_card())
        throw DimensionError("self_consistency_residual: solution shapes disagree");
    const Matrix& enc = sol.encoder.matrix();

    std::vector<double> marginal(tc, 0.0);
    for (std::size_t x = 0; x < pb.x_card(); ++x)
        for (std::size_t t = 0; t < tc; ++t) marginal[t] += pb.px[x] * enc(x, t);
    double residual = max_abs_diff(marginal, sol.marginal.probs());

    // p(y|t) from the stored encoder and the stored marginal.
    Matrix decoder(tc, pb.y_card());
    for (std::size_t t = 0; t < tc; ++t) {
        if (sol.marginal[t] <= 0.0) {
            std::copy(pb.py.begin(), pb.py.end(), decoder.row(t).begin());
            continue;
        }
        for (std::size_t x = 0; x < pb.x_card(); ++x) {
            const double pxt = pb.px[x] * enc(x, t) / sol.marginal[t];
            for (std::size_t y = 0; y < pb.y_card(); ++y) decoder(t, y) += pxt * pb.cond(x, y);
        }
    }
    residual = std::max(residual, max_abs_diff(decoder, sol.decoder.matrix()));

    const Matrix enc2 = detail::encoder_update(pb, sol.marginal.vec(), sol.decoder.matrix(), sol.beta);
    return std::max(residual, max_abs_diff(enc2, enc));
}

struct OracleResult {
    Encoder encoder;
    double L = 0.0;
    double R = 0.0;
    double I_Y = 0.0;
};

/// Enumerates every deterministic map X -> T and returns the one with the
/// smallest L = H(T) - beta * I(T;Y). Guarded at t_card^x_card <= 1e6.
inline OracleResult exhaustive_deterministic_oracle(const JointDistribution& j, std::size_t t_card,
                                                    double beta) {
    if (t_card == 0) throw DimensionError("oracle: t_card must be >= 1");
    constexpr double kLimit = 1e6;
    double count = 1.0;
    for (std::size_t x = 0; x < j.x_card(); ++x) {
        count *= static_cast<double>(t_card);
        if (count > kLimit) throw InstanceTooLargeError("oracle: t_card^x_card exceeds 1e6");
    }
    const std::size_t xc = j.x_card(), yc = j.y_card();
    std::vector<std::size_t> map(xc, 0);
    std::vector<std::size_t> best_map;
    OracleResult best;
    best.L = std::numeric_limits<double>::infinity();
    Matrix ty(t_card, yc);
    for (;;) {
        std::fill(ty.data().begin(), ty.data().end(), 0.0);
        for (std::size_t x = 0; x < xc; ++x)
            for (std::size_t y = 0; y < yc; ++y) ty(map[x], y) += j(x, y);
        const double rate = detail::entropy(detail::row_sums(ty));
        const double rel = detail::mutual_information(ty);
        const double L = rate - beta * rel;
        if (L < best.L) {
            best.L = L;
            best.R = rate;
            best.I_Y = rel;
            best_map = map;
        }
        std::size_t pos = 0;
        while (pos < xc && ++map[pos] == t_card) map[pos++] = 0;
        if (pos == xc) break;
    }
    Matrix enc(xc, t_card);
    for (std::size_t x = 0; x < xc; ++x) enc(x, best_map[x]) = 1.0;
    best.encoder = Encoder(std::move(enc));
    return best;
}

}  // namespace ibplane
