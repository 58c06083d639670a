#pragma once

// Reference computations used only by the tests. They are written from the
// definitions with long double and natural logs, independent of the
// library's code paths.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline long double entropy_bits(const std::vector<double>& p) {
    long double h = 0;
    for (double v : p)
        if (v > 0) h -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
    return h / std::log(2.0L);
}

inline long double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
    long double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) d += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / q[i]);
    return d / std::log(2.0L);
}

// I(X;Y) = H(X) + H(Y) - H(X,Y).
inline long double mutual_information_bits(const Rows& j) {
    std::vector<double> px(j.size(), 0.0), py(j.front().size(), 0.0), cells;
    for (std::size_t x = 0; x < j.size(); ++x)
        for (std::size_t y = 0; y < j[x].size(); ++y) {
            px[x] += j[x][y];
            py[y] += j[x][y];
            cells.push_back(j[x][y]);
        }
    return entropy_bits(px) + entropy_bits(py) - entropy_bits(cells);
}

inline double binary_entropy(double p) { return static_cast<double>(entropy_bits({p, 1 - p})); }

}  // namespace oracle
