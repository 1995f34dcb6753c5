#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sflsim {

// Seeded random source used everywhere a draw is needed.
//
// The engine is std::mt19937_64, whose output sequence is pinned by the
// standard, and every distribution below is derived from raw engine words
// by explicit arithmetic. std::uniform_real_distribution and friends are
// implementation-defined, so they must not appear here: two builds with
// the same seed have to produce bit-identical scenarios.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller on the portable uniform.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Gamma(shape, 1) by Marsaglia-Tsang, with the boost trick for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u > 0 ? u : 0x1.0p-53, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Weibull(shape k, scale lambda) by inverse CDF.
    double weibull(double shape, double scale) {
        double u = uniform();
        while (u >= 1.0) u = uniform();
        return scale * std::pow(-std::log(1.0 - u), 1.0 / shape);
    }

    // Symmetric Dirichlet over n categories.
    std::vector<double> dirichlet(std::size_t n, double concentration) {
        std::vector<double> out(n);
        double sum = 0.0;
        for (auto& v : out) {
            v = gamma(concentration);
            sum += v;
        }
        for (auto& v : out) v /= sum;
        return out;
    }

    // Fisher-Yates shuffle of the first |v| entries.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sflsim
