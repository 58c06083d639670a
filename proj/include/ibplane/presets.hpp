#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/prob.hpp"
#include "ibplane/random.hpp"

namespace ibplane {

struct PresetParams {
    double eps = 0.2;      // symmetric
    double eps1 = 0.05;    // hierarchical, coarsest level
    double eps2 = 0.2;     // hierarchical, every finer level
    std::size_t levels = 2;
    std::size_t k = 2;     // deterministic
    std::size_t x_card = 4;  // random, product
    std::size_t y_card = 2;  // random, product
    std::size_t d = 2;     // xor
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"symmetric", "product", "deterministic", "hierarchical", "random", "xor"};
    return names;
}

namespace presets {

/// Uniform binary X through a binary symmetric channel with flip eps.
inline JointDistribution symmetric(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ArgumentError("symmetric: eps must lie in [0,1]");
    return JointDistribution::from_rows({{0.5 * (1 - eps), 0.5 * eps}, {0.5 * eps, 0.5 * (1 - eps)}});
}

/// X uniform, Y with weights proportional to (y_card - y), independent.
inline JointDistribution product(std::size_t x_card, std::size_t y_card) {
    if (x_card == 0 || y_card == 0) throw ArgumentError("product: cardinalities must be >= 1");
    Matrix m(x_card, y_card);
    const double wsum = static_cast<double>(y_card * (y_card + 1)) / 2.0;
    for (std::size_t x = 0; x < x_card; ++x)
        for (std::size_t y = 0; y < y_card; ++y)
            m(x, y) = static_cast<double>(y_card - y) / wsum / static_cast<double>(x_card);
    return JointDistribution(std::move(m));
}

/// Y = X, uniform over k symbols.
inline JointDistribution deterministic(std::size_t k) {
    if (k == 0) throw ArgumentError("deterministic: k must be >= 1");
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i) m(i, i) = 1.0 / static_cast<double>(k);
    return JointDistribution(std::move(m));
}

/// X and Y are `levels`-bit words, X uniform. Bit l of Y copies bit l of X
/// through a symmetric channel: flip eps1 on the top bit, eps2 on the rest.
/// Distinct flip rates give separated critical betas, one split per level.
inline JointDistribution hierarchical(double eps1, double eps2, std::size_t levels) {
    if (levels == 0 || levels > 10) throw ArgumentError("hierarchical: levels must lie in [1,10]");
    if (!(eps1 >= 0.0 && eps1 <= 1.0 && eps2 >= 0.0 && eps2 <= 1.0)) throw ArgumentError("hierarchical: eps must lie in [0,1]");
    const std::size_t n = std::size_t{1} << levels;
    Matrix m(n, n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            double p = 1.0 / static_cast<double>(n);
            for (std::size_t l = 0; l < levels; ++l) {
                const std::size_t bit = levels - 1 - l;
                const double e = l == 0 ? eps1 : eps2;
                p *= ((x >> bit) & 1) == ((y >> bit) & 1) ? 1.0 - e : e;
            }
            m(x, y) = p;
        }
    return JointDistribution(std::move(m));
}

/// Flat Dirichlet draw over all x_card * y_card cells.
inline JointDistribution random(std::size_t x_card, std::size_t y_card, std::uint64_t seed) {
    if (x_card == 0 || y_card == 0) throw ArgumentError("random: cardinalities must be >= 1");
    Rng rng(seed);
    Matrix m(x_card, y_card);
    double s = 0.0;
    for (double& v : m.data()) s += v = rng.exponential();
    for (double& v : m.data()) v /= s;
    return JointDistribution(std::move(m));
}

/// X uniform over d-bit words, Y the parity of X.
inline JointDistribution xor_parity(std::size_t d) {
    if (d == 0 || d > 16) throw ArgumentError("xor: d must lie in [1,16]");
    const std::size_t n = std::size_t{1} << d;
    Matrix m(n, 2);
    for (std::size_t x = 0; x < n; ++x) m(x, static_cast<std::size_t>(__builtin_popcountll(x) & 1)) = 1.0 / static_cast<double>(n);
    return JointDistribution(std::move(m));
}

}  // namespace presets

inline JointDistribution gen_preset(std::string_view name, const PresetParams& p = {}, std::uint64_t seed = 0) {
    if (name == "symmetric") return presets::symmetric(p.eps);
    if (name == "product") return presets::product(p.x_card, p.y_card);
    if (name == "deterministic") return presets::deterministic(p.k);
    if (name == "hierarchical") return presets::hierarchical(p.eps1, p.eps2, p.levels);
    if (name == "random") return presets::random(p.x_card, p.y_card, seed);
    if (name == "xor") return presets::xor_parity(p.d);
    throw ArgumentError("unknown preset '" + std::string(name) + "'");
}

}  // namespace ibplane
