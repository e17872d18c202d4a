#pragma once

#include <cstdint>

namespace ethdr {

// Counter-based generator for weight initialization: a stateless splitmix64
// finalizer applied to (seed, stream, counter). Same inputs give the same
// bits on every platform, which is what makes builds reproducible.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(seed ^ 0xA0761D6478BD642FULL) + mix64(stream) + counter);
}

// Uniform in [0, 1) with a 24-bit mantissa.
inline float unit_float(std::uint64_t bits) {
    return static_cast<float>(bits >> 40) * (1.0f / 16777216.0f);
}

}  // namespace ethdr
