#pragma once

#include <cstdint>
#include <random>

namespace spinbath {

inline constexpr const char* rng_algorithm_name = "mt19937_64 (53-bit uniform), splitmix64 seed derivation";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for realisation k of a run with base seed s.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
    return splitmix64(base ^ splitmix64(k + 1));
}

// Portable uniform in [0,1); std::uniform_real_distribution is implementation-defined.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace spinbath
