#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ibplane {

// Seeded generator with distribution code written out by hand, so that the
// streams are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Rejection sampling removes modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Unit exponential; normalized draws give a flat Dirichlet.
    double exponential() {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return -std::log(u);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ibplane
