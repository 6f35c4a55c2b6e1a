#pragma once

#include <cstdint>
#include <random>

namespace jpa {

/// Stateless 64-bit mixer (splitmix64 finalizer). Used to derive stream
/// seeds from a base seed and an index so every scene, region, and noise
/// layer gets an independent, reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0, 1). Bypasses std::uniform_real_distribution, whose
/// output is implementation-defined; this mapping is stable everywhere.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [lo, hi] via rejection-free scaling. Good enough for
/// synthesis; not suitable where exact equiprobability matters.
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    const int span = hi - lo + 1;
    return lo + static_cast<int>(uniform01(rng) * span) % span;
}

}  // namespace jpa
