#pragma once

#include <cstdint>

namespace berry {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of replicate i under a base seed; independent of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
    return mix64(mix64(seed) ^ mix64(i + 0x632BE59BD9B4E019ULL));
}

/// The imaginary part of a complex wave uses seed ^ kComplexSeedXor.
inline constexpr std::uint64_t kComplexSeedXor = 0xA5A5A5A55A5A5A5AULL;

} // namespace berry
