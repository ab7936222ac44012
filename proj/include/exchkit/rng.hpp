#pragma once

// Counter-based RNG: every draw is a hash of (key, counter), so streams can
// be split per worker and replay identically regardless of call interleaving.

#include <cmath>
#include <cstdint>

namespace exchkit {

struct CounterRng {
    std::uint64_t key = 0;
    std::uint64_t ctr = 0;
    bool has_spare = false;
    double spare = 0;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(key ^ (0xD1B54A32D192ED03ull * ++ctr)); }

    // uniform on [0, 1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller with a cached spare
    double normal() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        double u1 = 0;
        while (u1 == 0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare = r * std::sin(2 * M_PI * u2);
        has_spare = true;
        return r * std::cos(2 * M_PI * u2);
    }

    CounterRng split(std::uint64_t stream) const { return CounterRng(key, stream + 1); }
};

}  // namespace exchkit
