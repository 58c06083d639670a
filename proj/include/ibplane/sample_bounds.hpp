#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ibplane/error.hpp"
#include "ibplane/ib_curve.hpp"

namespace ibplane {

// Finite-sample worst case of an empirical information curve. The
// generalization bounds are only known up to a constant, so c_bound is
// carried explicitly in every result.

struct BoundPoint {
    double R_hat = 0.0;
    double I_Y_hat = 0.0;
    double I_Y_worst = 0.0;  // max(0, I_Y_hat - c K |Y| / sqrt(n))
    double D_worst = 0.0;
    double R_upper = 0.0;    // R_hat + c K / sqrt(n); reported only

    friend bool operator==(const BoundPoint&, const BoundPoint&) = default;
};

struct BoundCurve {
    std::vector<BoundPoint> points;
    double n = 0.0;
    double c_bound = 1.0;
    std::size_t optimum_index = 0;
    double R_star = 0.0;
    double D_star = 0.0;
};

struct NetworkGaps {
    double R_N = 0.0;
    double D_N = 0.0;
    double delta_G = 0.0;  // D_N - D_star
    double delta_C = 0.0;  // R_N - R_star
};

/// c K |Y| / sqrt(n), the worst-case slack on the empirical I(T;Y).
inline double worst_case_correction(double K, std::size_t y_card, double n, double c_bound = 1.0) {
    if (!(n >= 1.0)) throw ArgumentError("worst_case_correction: n must be >= 1");
    if (!(K >= 1.0)) throw ArgumentError("worst_case_correction: K must be >= 1");
    return c_bound * K * static_cast<double>(y_card) / std::sqrt(n);
}

/// Worst-case curve with K = 2^R_hat at every point. The optimum minimizes
/// D_worst; ties go to the smaller R_hat.
inline BoundCurve bound_curve(const std::vector<CurvePoint>& curve, std::size_t y_card, double n,
                              double c_bound = 1.0) {
    if (curve.empty()) throw ArgumentError("bound_curve: empty curve");
    if (!(c_bound >= 0.0)) throw ArgumentError("bound_curve: c_bound must be >= 0");
    BoundCurve b;
    b.n = n;
    b.c_bound = c_bound;
    b.points.reserve(curve.size());
    // One value of the empirical I(X;Y) for the whole curve, so points whose
    // lower bound clamps to 0 tie exactly.
    double mi = 0.0;
    for (const auto& p : curve) mi = std::max(mi, p.D_IB + p.I_Y);
    for (const auto& p : curve) {
        const double K = std::exp2(p.R);
        const double slack = worst_case_correction(K, y_card, n, c_bound);
        BoundPoint q;
        q.R_hat = p.R;
        q.I_Y_hat = p.I_Y;
        q.I_Y_worst = std::max(0.0, p.I_Y - slack);
        q.D_worst = std::max(p.D_IB, mi - q.I_Y_worst);
        q.R_upper = p.R + c_bound * K / std::sqrt(n);
        b.points.push_back(q);
    }
    for (std::size_t i = 1; i < b.points.size(); ++i) {
        const auto& c = b.points[i];
        const auto& o = b.points[b.optimum_index];
        if (c.D_worst < o.D_worst || (c.D_worst == o.D_worst && c.R_hat < o.R_hat)) b.optimum_index = i;
    }
    b.R_star = b.points[b.optimum_index].R_hat;
    b.D_star = b.points[b.optimum_index].D_worst;
    return b;
}

inline BoundCurve bound_curve(const InfoCurve& curve, std::size_t y_card, double n, double c_bound = 1.0) {
    return bound_curve(curve.points, y_card, n, c_bound);
}

inline NetworkGaps network_gaps(const BoundCurve& b, double R_N, double D_N) {
    if (b.points.empty()) throw ArgumentError("network_gaps: bound curve has no optimum");
    return {R_N, D_N, D_N - b.D_star, R_N - b.R_star};
}

}  // namespace ibplane
