#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace caegcn {

// Seeded RNG with hand-rolled distributions. std::uniform_real_distribution is
// not pinned down by the standard, so we derive doubles from raw mt19937_64
// output to get run-to-run and platform-to-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // [0, 1)
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n = 0");
        return std::size_t(uniform01() * double(n)) % n;
    }

    // Index drawn with probability proportional to weights[i]; requires a
    // positive total weight.
    std::size_t pick_weighted(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("pick_weighted: nonpositive total");
        double r = uniform01() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return i;
        }
        for (std::size_t i = weights.size(); i-- > 0;) {
            if (weights[i] > 0.0) return i;
        }
        return weights.size() - 1;
    }

    // Standard normal via Box-Muller.
    double normal01() {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace caegcn
