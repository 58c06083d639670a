#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/matrix.hpp"
#include "ibplane/random.hpp"

namespace ibplane {

/// Tolerance on total mass when a distribution is constructed.
inline constexpr double kProbTolerance = 1e-9;

/// Returned by kl_divergence when p has mass where q has none.
inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

namespace detail {

inline void check_mass(std::span<const double> p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidDistributionError(std::string(what) + ": negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbTolerance)
        throw InvalidDistributionError(std::string(what) + ": mass " + std::to_string(sum) +
                                       " differs from 1");
}

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline double entropy(std::span<const double> p) {
    if (std::count_if(p.begin(), p.end(), [](double v) { return v > 0.0; }) <= 1) return 0.0;
    double h = 0.0;
    for (double v : p) h -= plogp(v);
    return h < 0.0 ? 0.0 : h;
}

inline double kl(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw DimensionError("kl_divergence: length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInfiniteDivergence;
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return d < 0.0 ? 0.0 : d;
}

inline std::vector<double> row_sums(const Matrix& m) {
    std::vector<double> s(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (double v : m.row(r)) s[r] += v;
    return s;
}

inline std::vector<double> col_sums(const Matrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) s[c] += m(r, c);
    return s;
}

// Mutual information of an unnormalized-checked joint matrix, in bits.
inline double mutual_information(const Matrix& joint) {
    const auto px = row_sums(joint);
    const auto py = col_sums(joint);
    const auto support = [](const std::vector<double>& v) { return std::count_if(v.begin(), v.end(), [](double q) { return q > 0.0; }); };
    if (support(px) <= 1 || support(py) <= 1) return 0.0;
    double mi = 0.0;
    for (std::size_t x = 0; x < joint.rows(); ++x)
        for (std::size_t y = 0; y < joint.cols(); ++y) {
            const double p = joint(x, y);
            if (p > 0.0) mi += p * std::log2(p / (px[x] * py[y]));
        }
    return mi < 0.0 ? 0.0 : mi;
}

}  // namespace detail

class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    explicit DiscreteDistribution(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) throw DimensionError("distribution over an empty alphabet");
        detail::check_mass(p_, "DiscreteDistribution");
    }

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    std::span<const double> probs() const noexcept { return p_; }
    const std::vector<double>& vec() const noexcept { return p_; }

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    std::vector<double> p_;
};

/// Row-stochastic matrix: row r is p(. | r).
class ConditionalMatrix {
public:
    ConditionalMatrix() = default;
    explicit ConditionalMatrix(Matrix m) : m_(std::move(m)) {
        for (std::size_t r = 0; r < m_.rows(); ++r) detail::check_mass(m_.row(r), "ConditionalMatrix row");
    }

    std::size_t rows() const noexcept { return m_.rows(); }
    std::size_t cols() const noexcept { return m_.cols(); }
    double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
    std::span<const double> row(std::size_t r) const { return m_.row(r); }
    const Matrix& matrix() const noexcept { return m_; }

    friend bool operator==(const ConditionalMatrix&, const ConditionalMatrix&) = default;

private:
    Matrix m_;
};

/// Discrete joint p(x, y); rows index X, columns index Y.
class JointDistribution {
public:
    JointDistribution() = default;
    explicit JointDistribution(Matrix p) : p_(std::move(p)) {
        if (p_.rows() == 0 || p_.cols() == 0) throw DimensionError("joint needs x_card, y_card >= 1");
        detail::check_mass(p_.data(), "JointDistribution");
    }
    static JointDistribution from_rows(const std::vector<std::vector<double>>& rows) {
        return JointDistribution(Matrix::from_rows(rows));
    }

    std::size_t x_card() const noexcept { return p_.rows(); }
    std::size_t y_card() const noexcept { return p_.cols(); }
    double operator()(std::size_t x, std::size_t y) const { return p_(x, y); }
    const Matrix& matrix() const noexcept { return p_; }

    DiscreteDistribution px() const { return DiscreteDistribution(detail::row_sums(p_)); }
    DiscreteDistribution py() const { return DiscreteDistribution(detail::col_sums(p_)); }
    JointDistribution transpose() const { return JointDistribution(p_.transpose()); }

    friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

private:
    Matrix p_;
};

struct SampleSet {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    std::size_t n() const noexcept { return pairs.size(); }
    friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

inline double entropy(const DiscreteDistribution& d) { return detail::entropy(d.probs()); }

inline double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    return detail::kl(p.probs(), q.probs());
}

inline double mutual_information(const JointDistribution& j) {
    return detail::mutual_information(j.matrix());
}

/// Conditional entropy H(Y|X) = sum_x p(x) H(p(y|x)).
inline double conditional_entropy(const JointDistribution& j) {
    const auto px = detail::row_sums(j.matrix());
    double h = 0.0;
    for (std::size_t x = 0; x < j.x_card(); ++x) {
        if (px[x] <= 0.0) continue;
        for (std::size_t y = 0; y < j.y_card(); ++y) h -= j(x, y) * std::log2(j(x, y) > 0 ? j(x, y) / px[x] : 1.0);
    }
    return h < 0.0 ? 0.0 : h;
}

struct Decomposition {
    DiscreteDistribution px;
    ConditionalMatrix py_given_x;
};

/// Splits p(x,y) into p(x) and p(y|x). Rows with p(x) = 0 get a uniform
/// conditional; they carry no mass so nothing downstream depends on them.
inline Decomposition decompose(const JointDistribution& j) {
    auto px = detail::row_sums(j.matrix());
    Matrix cond(j.x_card(), j.y_card());
    const double uniform = 1.0 / static_cast<double>(j.y_card());
    for (std::size_t x = 0; x < j.x_card(); ++x) {
        for (std::size_t y = 0; y < j.y_card(); ++y)
            cond(x, y) = px[x] > 0.0 ? j(x, y) / px[x] : uniform;
    }
    return {DiscreteDistribution(std::move(px)), ConditionalMatrix(std::move(cond))};
}

/// n i.i.d. draws from j by inverse CDF over the row-major cells.
inline SampleSet sample_pairs(const JointDistribution& j, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ArgumentError("sample_pairs: n must be >= 1");
    const auto cells = j.matrix().data();
    std::vector<double> cdf(cells.size());
    double acc = 0.0;
    std::size_t last_supported = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        acc += cells[i];
        cdf[i] = acc;
        if (cells[i] > 0.0) last_supported = i;
    }
    Rng rng(seed);
    SampleSet s;
    s.pairs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform01() * acc;
        std::size_t cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (cell > last_supported) cell = last_supported;
        s.pairs.emplace_back(cell / j.y_card(), cell % j.y_card());
    }
    return s;
}

/// Plug-in estimate count(x,y)/n.
inline JointDistribution empirical_joint(const SampleSet& s, std::size_t x_card, std::size_t y_card) {
    if (s.n() == 0) throw EmptySampleError("empirical_joint: no samples");
    Matrix counts(x_card, y_card);
    for (auto [x, y] : s.pairs) {
        if (x >= x_card || y >= y_card) throw DimensionError("empirical_joint: sample index out of range");
        counts(x, y) += 1.0;
    }
    const double n = static_cast<double>(s.n());
    for (double& v : counts.data()) v /= n;
    return JointDistribution(std::move(counts));
}

}  // namespace ibplane
