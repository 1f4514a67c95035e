#pragma once

#include <cstdint>
#include <random>

namespace covrec {

// splitmix64: used to whiten user seeds and to derive independent per-run
// streams from (base seed, indices) so replications never share state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base) { return splitmix64(base); }

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t next, Rest... rest) {
    return mix_seed(splitmix64(base) ^ (next + 0x9E3779B97F4A7C15ull), rest...);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

/// Uniform double in [0,1) with exactly 53 random bits; bit-identical across
/// standard library implementations, unlike uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& g, double lo, double hi) {
    return lo + uniform01(g) * (hi - lo);
}

/// Uniform integer in [0, n), n > 0, via rejection-free scaling (n is tiny here).
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
    return static_cast<std::size_t>(uniform01(g) * static_cast<double>(n));
}

}  // namespace covrec
