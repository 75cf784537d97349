#pragma once

// Portable seeded randomness. std::mt19937_64 output is fixed by the standard;
// the distributions in <random> are not, so the few draws we need are done here.

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace sysx {

using Rng = std::mt19937_64;

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Seed derived from a base seed and a stable key (e.g. a problem id).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    return fnv1a(key, 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL));
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Uniform in [0, 1).
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_below(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace sysx
