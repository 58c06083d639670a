#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/mlp.hpp"
#include "ibplane/prob.hpp"

namespace ibplane {

/// Uniform binning of sigmoidal activations on (0,1). With exact = true the
/// raw activation tuples are used as codes instead.
struct QuantizerConfig {
    std::size_t bins = 8;
    bool exact = false;
};

/// One symbol per input x; kNoCode marks an x without a symbol.
using LayerCodes = std::vector<std::size_t>;
inline constexpr std::size_t kNoCode = std::numeric_limits<std::size_t>::max();

struct LayerInfo {
    double I_X = 0.0;
    double I_Y = 0.0;
};

struct InfoPlanePoint {
    std::size_t layer_index = 0;  // 0 = X, m+1 = Y-hat
    double I_X = 0.0;
    double I_Y = 0.0;
    double layer_criterion = 0.0;  // I(h_{i-1};h_i) + beta I(Y;h_{i-1}|h_i); 0 for layer 0
};

struct DpiViolation {
    std::size_t from = 0;
    std::size_t to = 0;
    double magnitude = 0.0;
};

struct LayerPath {
    std::vector<InfoPlanePoint> points;
    std::vector<DpiViolation> dpi_violations;
};

inline std::vector<LayerActivations> activations_for_all(const NetworkParams& net, std::size_t x_card) {
    std::vector<LayerActivations> acts;
    acts.reserve(x_card);
    for (std::size_t x = 0; x < x_card; ++x) acts.push_back(forward(net, x, x_card));
    return acts;
}

inline std::size_t bin_of(double activation, std::size_t bins) {
    const double scaled = std::floor(activation * static_cast<double>(bins));
    if (scaled <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(scaled), bins - 1);
}

namespace detail {

// Dense codes in order of first appearance over x.
template <typename Key>
LayerCodes densify(const std::vector<Key>& keys) {
    std::map<Key, std::size_t> ids;
    LayerCodes codes(keys.size());
    for (std::size_t x = 0; x < keys.size(); ++x) {
        auto [it, inserted] = ids.try_emplace(keys[x], ids.size());
        codes[x] = it->second;
    }
    return codes;
}

}  // namespace detail

/// Codes for every hidden layer: the tuple of per-unit bins (or of exact
/// activations), numbered densely.
inline std::vector<LayerCodes> quantize_activations(std::span<const LayerActivations> acts, const QuantizerConfig& q) {
    if (!q.exact && q.bins < 2) throw ArgumentError("quantize_activations: bins must be >= 2");
    if (acts.empty()) return {};
    const std::size_t layers = acts.front().hidden.size();
    std::vector<LayerCodes> out;
    for (std::size_t l = 0; l < layers; ++l) {
        if (q.exact) {
            std::vector<std::vector<double>> keys;
            for (const auto& a : acts) keys.push_back(a.hidden.at(l));
            out.push_back(detail::densify(keys));
        } else {
            std::vector<std::vector<std::size_t>> keys;
            for (const auto& a : acts) {
                std::vector<std::size_t> k;
                for (double v : a.hidden.at(l)) k.push_back(bin_of(v, q.bins));
                keys.push_back(std::move(k));
            }
            out.push_back(detail::densify(keys));
        }
    }
    return out;
}

/// Argmax of the output distribution; ties go to the lowest index.
inline LayerCodes prediction_codes(std::span<const LayerActivations> acts) {
    LayerCodes codes;
    for (const auto& a : acts)
        codes.push_back(static_cast<std::size_t>(std::max_element(a.output.begin(), a.output.end()) - a.output.begin()));
    return codes;
}

namespace detail {

// p(t, y) for a deterministic code map x -> t.
inline Matrix push_forward(const JointDistribution& j, const LayerCodes& codes) {
    if (codes.size() != j.x_card()) throw CoverageError("layer codes do not cover the X alphabet");
    std::map<std::size_t, std::size_t> dense;
    for (std::size_t x = 0; x < codes.size(); ++x) {
        double px = 0.0;
        for (std::size_t y = 0; y < j.y_card(); ++y) px += j(x, y);
        if (codes[x] == kNoCode) {
            if (px > 0.0) throw CoverageError("no code for supported x=" + std::to_string(x));
            continue;
        }
        dense.try_emplace(codes[x], dense.size());
    }
    Matrix ty(std::max<std::size_t>(dense.size(), 1), j.y_card());
    for (std::size_t x = 0; x < codes.size(); ++x) {
        if (codes[x] == kNoCode) continue;
        const std::size_t t = dense.at(codes[x]);
        for (std::size_t y = 0; y < j.y_card(); ++y) ty(t, y) += j(x, y);
    }
    return ty;
}

inline LayerCodes pair_codes(const LayerCodes& a, const LayerCodes& b) {
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    for (std::size_t x = 0; x < a.size(); ++x) keys.emplace_back(a[x], b[x]);
    auto codes = densify(keys);
    for (std::size_t x = 0; x < a.size(); ++x)
        if (a[x] == kNoCode || b[x] == kNoCode) codes[x] = kNoCode;
    return codes;
}

}  // namespace detail

/// I(X;T) = H(T) and I(T;Y) for a layer T that is a deterministic function
/// of X, computed exactly from p(x,y).
inline LayerInfo layer_mutual_information(const JointDistribution& j, const LayerCodes& codes) {
    const Matrix ty = detail::push_forward(j, codes);
    return {detail::entropy(detail::row_sums(ty)), detail::mutual_information(ty)};
}

/// I(h_prev; h_cur) + beta * I(Y; h_prev | h_cur) over deterministic codes.
inline double layer_criterion(const JointDistribution& j, const LayerCodes& prev, const LayerCodes& cur, double beta) {
    const auto both = detail::pair_codes(prev, cur);
    const auto a = layer_mutual_information(j, prev);
    const auto b = layer_mutual_information(j, cur);
    const auto ab = layer_mutual_information(j, both);
    const double mutual = std::max(0.0, a.I_X + b.I_X - ab.I_X);
    const double residual = std::max(0.0, ab.I_Y - b.I_Y);
    return mutual + beta * residual;
}

/// Adjacent pairs where I_Y grows with depth by more than 1e-9.
inline std::vector<DpiViolation> dpi_check(const LayerPath& path) {
    std::vector<DpiViolation> out;
    for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
        const double gain = path.points[i + 1].I_Y - path.points[i].I_Y;
        if (gain > 1e-9) out.push_back({path.points[i].layer_index, path.points[i + 1].layer_index, gain});
    }
    return out;
}

/// Path through the plane for a stack of code maps; codes[0] must be X.
inline LayerPath path_from_codes(const JointDistribution& j, const std::vector<LayerCodes>& codes, double beta) {
    LayerPath path;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        const auto info = layer_mutual_information(j, codes[i]);
        const double crit = i == 0 ? 0.0 : layer_criterion(j, codes[i - 1], codes[i], beta);
        path.points.push_back({i, info.I_X, info.I_Y, crit});
    }
    path.dpi_violations = dpi_check(path);
    return path;
}

inline LayerCodes identity_codes(std::size_t x_card) {
    LayerCodes c(x_card);
    for (std::size_t x = 0; x < x_card; ++x) c[x] = x;
    return c;
}

/// X, every quantized hidden layer, and the prediction Y-hat.
inline std::vector<LayerCodes> network_codes(const JointDistribution& j, const NetworkParams& net, const QuantizerConfig& q) {
    if (net.input_width() != j.x_card()) throw DimensionError("network input width differs from x_card");
    const auto acts = activations_for_all(net, j.x_card());
    std::vector<LayerCodes> codes{identity_codes(j.x_card())};
    for (auto& c : quantize_activations(acts, q)) codes.push_back(std::move(c));
    codes.push_back(prediction_codes(acts));
    return codes;
}

inline LayerPath info_plane_path(const JointDistribution& j, const NetworkParams& net, const QuantizerConfig& q,
                                 double beta = 1.0) {
    return path_from_codes(j, network_codes(j, net, q), beta);
}

struct DistortionRate {
    double R_N = 0.0;  // I(X; Y-hat)
    double D_N = 0.0;  // I(X;Y) - I(Y-hat;Y) = I(X;Y|Y-hat)
};

/// Rate and IB distortion of the prediction map x -> argmax output.
inline DistortionRate network_distortion_rate(const JointDistribution& j, const NetworkParams& net) {
    if (net.input_width() != j.x_card()) throw DimensionError("network input width differs from x_card");
    const auto info = layer_mutual_information(j, prediction_codes(activations_for_all(net, j.x_card())));
    return {info.I_X, std::max(0.0, mutual_information(j) - info.I_Y)};
}

struct LayerAssignment {
    double beta = 0.0;
    std::size_t best_layer = 0;  // hidden layer or Y-hat minimizing the criterion
    double criterion = 0.0;
};

/// For each beta, the layer (index >= 1) with the smallest criterion; ties
/// go to the shallower layer.
inline std::vector<LayerAssignment> sweep_layer_criterion(const JointDistribution& j, const std::vector<LayerCodes>& codes,
                                                          const std::vector<double>& betas) {
    std::vector<LayerAssignment> out;
    if (codes.size() < 2) return out;
    for (double beta : betas) {
        LayerAssignment best{beta, 1, layer_criterion(j, codes[0], codes[1], beta)};
        for (std::size_t i = 2; i < codes.size(); ++i) {
            const double c = layer_criterion(j, codes[i - 1], codes[i], beta);
            if (c < best.criterion) best = {beta, i, c};
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace ibplane
