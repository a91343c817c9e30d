#pragma once

#include <cstdint>

namespace nambu {

/// Counter-based generator: every variate is a pure function of
/// (seed, stream, counter), so parallel workers draw identical numbers
/// regardless of scheduling.
struct CounterRng {
    std::uint64_t seed = 0x853C49E6748FEA9Bull;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        const std::uint64_t key = mix(seed ^ (0xA24BAED4963EE407ull * (stream + 1)));
        return mix(key + 0x9E3779B97F4A7C15ull * counter);
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(std::uint64_t stream, std::uint64_t counter, double lo,
                   double hi) const {
        return lo + (hi - lo) * uniform(stream, counter);
    }
};

} // namespace nambu
