#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/prob.hpp"
#include "ibplane/random.hpp"

namespace ibplane {

/// Sigmoidal feedforward network. weights[k] maps layer k to layer k+1 and
/// has shape (layer_sizes[k+1] x layer_sizes[k]). An output layer of width 1
/// is a single sigmoid giving p(y=1|x); wider outputs are a softmax over Y.
struct NetworkParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    std::size_t input_width() const { return layer_sizes.front(); }
    std::size_t hidden_count() const { return layer_sizes.size() - 2; }
    std::size_t output_classes() const { return layer_sizes.back() == 1 ? 2 : layer_sizes.back(); }

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct LayerActivations {
    std::vector<std::vector<double>> hidden;  // h_1 ... h_m
    std::vector<double> output;               // distribution over Y
};

struct TrainConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    // Additive uniform noise on hidden pre-activations during training.
    // Zero keeps every layer deterministic.
    double hidden_noise = 0.0;
};

struct TrainResult {
    NetworkParams net;
    std::vector<double> losses;  // full-sample mean cross-entropy after each epoch, nats
};

inline double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline void validate_network(const NetworkParams& net) {
    const auto& s = net.layer_sizes;
    if (s.size() < 2) throw DimensionError("network needs at least input and output layers");
    if (net.weights.size() != s.size() - 1 || net.biases.size() != s.size() - 1)
        throw DimensionError("network: weight/bias count does not match layer count");
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        if (s[k] == 0 || s[k + 1] == 0) throw DimensionError("network: empty layer");
        if (net.weights[k].rows() != s[k + 1] || net.weights[k].cols() != s[k] || net.biases[k].size() != s[k + 1])
            throw DimensionError("network: layer " + std::to_string(k) + " has inconsistent shape");
        for (double v : net.weights[k].data())
            if (!std::isfinite(v)) throw DimensionError("network: non-finite weight");
        for (double v : net.biases[k])
            if (!std::isfinite(v)) throw DimensionError("network: non-finite bias");
    }
}

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
inline NetworkParams init_network(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw DimensionError("init_network: need at least 2 layers");
    Rng rng(seed);
    NetworkParams net;
    net.layer_sizes = layer_sizes;
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        if (layer_sizes[k] == 0 || layer_sizes[k + 1] == 0) throw DimensionError("init_network: empty layer");
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer_sizes[k]));
        Matrix w(layer_sizes[k + 1], layer_sizes[k]);
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(layer_sizes[k + 1], 0.0);
    }
    return net;
}

namespace detail {

struct Trace {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts[k] = layer k
    std::vector<double> logits;
};

inline Trace run_layers(const NetworkParams& net, std::size_t x_index, double noise, Rng* rng) {
    Trace tr;
    const std::size_t depth = net.weights.size();
    tr.acts.resize(depth);
    tr.acts[0].assign(net.input_width(), 0.0);
    tr.acts[0][x_index] = 1.0;
    for (std::size_t k = 0; k < depth; ++k) {
        const Matrix& w = net.weights[k];
        std::vector<double> z(net.biases[k]);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const auto row = w.row(r);
            z[r] += std::inner_product(row.begin(), row.end(), tr.acts[k].begin(), 0.0);
        }
        if (k + 1 == depth) {
            tr.logits = std::move(z);
        } else {
            for (double& v : z) {
                if (noise > 0.0 && rng != nullptr) v += rng->uniform(-noise, noise);
                v = sigmoid(v);
            }
            tr.acts[k + 1] = std::move(z);
        }
    }
    return tr;
}

inline std::vector<double> output_distribution(const std::vector<double>& logits) {
    if (logits.size() == 1) {
        const double s = sigmoid(logits[0]);
        return {1.0 - s, s};
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z += p[i] = std::exp(logits[i] - top);
    for (double& v : p) v /= z;
    return p;
}

// -ln p(y|x) computed from the logits without forming p.
inline double nll(const std::vector<double>& logits, std::size_t y) {
    if (logits.size() == 1) {
        const double u = y == 1 ? -logits[0] : logits[0];
        return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - top);
    return top + std::log(z) - logits[y];
}

inline void check_input(const NetworkParams& net, std::size_t x_index, std::size_t x_card) {
    if (x_card != net.input_width()) throw DimensionError("forward: input width differs from x_card");
    if (x_index >= x_card) throw DimensionError("forward: x_index out of range");
}

}  // namespace detail

/// Activations of every hidden layer for the one-hot input x_index.
inline LayerActivations forward(const NetworkParams& net, std::size_t x_index, std::size_t x_card) {
    detail::check_input(net, x_index, x_card);
    auto tr = detail::run_layers(net, x_index, 0.0, nullptr);
    LayerActivations a;
    a.hidden.assign(std::make_move_iterator(tr.acts.begin() + 1), std::make_move_iterator(tr.acts.end()));
    a.output = detail::output_distribution(tr.logits);
    return a;
}

/// forward() with uniform noise of the given magnitude added to every hidden
/// pre-activation: a stochastic map between layers.
inline LayerActivations forward_noisy(const NetworkParams& net, std::size_t x_index, std::size_t x_card,
                                      double magnitude, Rng& rng) {
    detail::check_input(net, x_index, x_card);
    auto tr = detail::run_layers(net, x_index, magnitude, &rng);
    LayerActivations a;
    a.hidden.assign(std::make_move_iterator(tr.acts.begin() + 1), std::make_move_iterator(tr.acts.end()));
    a.output = detail::output_distribution(tr.logits);
    return a;
}

/// Mean cross-entropy (nats) over the given pairs.
inline double mean_loss(const NetworkParams& net, std::span<const std::pair<std::size_t, std::size_t>> pairs) {
    if (pairs.empty()) throw EmptySampleError("mean_loss: no samples");
    // Inputs are symbols, so evaluate each x once.
    std::vector<std::vector<double>> logits(net.input_width());
    std::vector<bool> done(net.input_width(), false);
    double total = 0.0;
    for (auto [x, y] : pairs) {
        if (x >= net.input_width() || y >= net.output_classes()) throw DimensionError("mean_loss: sample out of range");
        if (!done[x]) {
            logits[x] = detail::run_layers(net, x, 0.0, nullptr).logits;
            done[x] = true;
        }
        total += detail::nll(logits[x], y);
    }
    return total / static_cast<double>(pairs.size());
}

/// Mean cross-entropy and its gradient by backpropagation. The gradient has
/// the same layout as the network.
inline std::pair<double, NetworkParams> loss_gradient(const NetworkParams& net,
                                                      std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                                      double noise = 0.0, Rng* rng = nullptr) {
    if (pairs.empty()) throw EmptySampleError("loss_gradient: no samples");
    NetworkParams g;
    g.layer_sizes = net.layer_sizes;
    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        g.weights.emplace_back(net.weights[k].rows(), net.weights[k].cols());
        g.biases.emplace_back(net.biases[k].size(), 0.0);
    }
    const std::size_t depth = net.weights.size();
    double loss = 0.0;
    for (auto [x, y] : pairs) {
        if (x >= net.input_width() || y >= net.output_classes()) throw DimensionError("loss_gradient: sample out of range");
        auto tr = detail::run_layers(net, x, noise, rng);
        loss += detail::nll(tr.logits, y);
        std::vector<double> delta;
        if (tr.logits.size() == 1) {
            delta = {sigmoid(tr.logits[0]) - static_cast<double>(y)};
        } else {
            delta = detail::output_distribution(tr.logits);
            delta[y] -= 1.0;
        }
        for (std::size_t k = depth; k-- > 0;) {
            const auto& in = tr.acts[k];
            Matrix& gw = g.weights[k];
            for (std::size_t r = 0; r < gw.rows(); ++r) {
                g.biases[k][r] += delta[r];
                if (delta[r] == 0.0) continue;
                auto row = gw.row(r);
                for (std::size_t c = 0; c < row.size(); ++c) row[c] += delta[r] * in[c];
            }
            if (k == 0) break;
            std::vector<double> prev(in.size(), 0.0);
            const Matrix& w = net.weights[k];
            for (std::size_t r = 0; r < w.rows(); ++r)
                for (std::size_t c = 0; c < w.cols(); ++c) prev[c] += w(r, c) * delta[r];
            for (std::size_t c = 0; c < prev.size(); ++c) prev[c] *= in[c] * (1.0 - in[c]);
            delta = std::move(prev);
        }
    }
    const double inv = 1.0 / static_cast<double>(pairs.size());
    for (auto& w : g.weights)
        for (double& v : w.data()) v *= inv;
    for (auto& b : g.biases)
        for (double& v : b) v *= inv;
    return {loss * inv, std::move(g)};
}

/// Plain mini-batch SGD on cross-entropy with a seeded shuffle per epoch.
inline TrainResult train_sgd(NetworkParams net, const SampleSet& samples, const TrainConfig& cfg) {
    validate_network(net);
    if (samples.n() == 0) throw EmptySampleError("train_sgd: no samples");
    if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0) throw ArgumentError("train_sgd: learning_rate and batch_size must be positive");
    for (auto [x, y] : samples.pairs)
        if (x >= net.input_width() || y >= net.output_classes()) throw DimensionError("train_sgd: sample out of range");

    Rng rng(cfg.seed);
    Rng noise_rng(cfg.seed ^ 0x5DEECE66DULL);
    auto order = samples.pairs;
    TrainResult res;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            auto [_, g] = loss_gradient(net, std::span(order).subspan(start, len), cfg.hidden_noise,
                                        cfg.hidden_noise > 0.0 ? &noise_rng : nullptr);
            for (std::size_t k = 0; k < net.weights.size(); ++k) {
                auto w = net.weights[k].data();
                const auto gw = g.weights[k].data();
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * gw[i];
                for (std::size_t i = 0; i < net.biases[k].size(); ++i)
                    net.biases[k][i] -= cfg.learning_rate * g.biases[k][i];
            }
        }
        const double loss = mean_loss(net, samples.pairs);
        if (!std::isfinite(loss)) throw DivergenceError("train_sgd: non-finite loss at epoch " + std::to_string(epoch));
        res.losses.push_back(loss);
    }
    res.net = std::move(net);
    return res;
}

/// Single sigmoid unit computing the Bayes posterior p(y=1|x) for binary
/// features that are conditionally independent given binary y. Each feature
/// contributes log p(x_j|y=1)/p(x_j|y=0) for its observed value.
struct NaiveBayesNeuron {
    std::vector<double> active_weights;    // log p(x_j=1|y=1) / p(x_j=1|y=0)
    std::vector<double> inactive_weights;  // log p(x_j=0|y=1) / p(x_j=0|y=0)
    double bias = 0.0;                     // log p(y=1) / p(y=0)

    /// Weights on the raw 0/1 features once the inactive terms are folded
    /// into the bias.
    std::vector<double> weights() const {
        std::vector<double> w(active_weights.size());
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = active_weights[j] - inactive_weights[j];
        return w;
    }
    double folded_bias() const {
        return std::accumulate(inactive_weights.begin(), inactive_weights.end(), bias);
    }

    double posterior(std::span<const int> features) const {
        if (features.size() != active_weights.size()) throw DimensionError("naive Bayes neuron: feature count");
        double u = bias;
        for (std::size_t j = 0; j < features.size(); ++j) u += features[j] ? active_weights[j] : inactive_weights[j];
        return sigmoid(u);
    }
};

inline NaiveBayesNeuron naive_bayes_neuron(std::span<const double> p_on_given_y1, std::span<const double> p_on_given_y0,
                                           double prior_y1) {
    if (p_on_given_y1.size() != p_on_given_y0.size()) throw DimensionError("naive_bayes_neuron: feature count mismatch");
    auto open = [](double p) { return p > 0.0 && p < 1.0; };
    if (!open(prior_y1)) throw UnsupportedDegenerateError("naive_bayes_neuron: prior must lie in (0,1)");
    NaiveBayesNeuron n;
    n.bias = std::log(prior_y1 / (1.0 - prior_y1));
    for (std::size_t j = 0; j < p_on_given_y1.size(); ++j) {
        const double a = p_on_given_y1[j], b = p_on_given_y0[j];
        if (!open(a) || !open(b)) throw UnsupportedDegenerateError("naive_bayes_neuron: feature probability at 0 or 1");
        n.active_weights.push_back(std::log(a / b));
        n.inactive_weights.push_back(std::log((1.0 - a) / (1.0 - b)));
    }
    return n;
}

}  // namespace ibplane
