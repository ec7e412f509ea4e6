#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace grbm {

/// Stateless 64-bit mixer used to derive independent seeds from a base seed
/// plus stream indices (trial counters, restart counters, solver ids).
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seeded random stream. Wraps std::mt19937_64 (bit-exact across platforms)
/// and provides the distributions this project needs without going through
/// std::*_distribution, whose output sequences are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; consumes exactly two engine draws.
    double normal()
    {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps the log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Index drawn from normalized probabilities by inverse CDF.
    std::size_t categorical(std::span<const double> probs)
    {
        const double r = uniform01();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            acc += probs[k];
            if (r < acc)
                return k;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace grbm
