#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cssdr {

/// Seeded generator with a fully specified normal sampler.
///
/// std::normal_distribution is implementation-defined, so Gaussian draws go
/// through an explicit Box-Muller transform on top of mt19937_64. Two
/// uniforms are consumed per normal draw (no spare caching), which keeps the
/// draw sequence independent of call history.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        double u1 = uniform01();
        const double u2 = uniform01();
        if (u1 < 1e-300) {
            u1 = 1e-300;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; decorrelates nearby seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic per-stream, per-index seed derivation from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return mix_seed(master ^ mix_seed(stream * 0xD1342543DE82EF95ULL + index));
}

}  // namespace cssdr
