// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace symprune {

// std::mt19937_64 output is fully specified by the standard, but the
// distributions are not. Everything below draws from the raw engine output so
// results are identical across standard libraries.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine keyed by (seed, stream, index). Independent of the order in which
/// keys are visited, so row/column samples do not depend on scheduling.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t k = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    return std::mt19937_64(k);
}

/// Uniform integer in [0, bound), rejection sampled.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t x = eng();
        if (x < limit) return x % bound;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& eng, double lo, double hi) { return lo + (hi - lo) * uniform01(eng); }

/// Standard normal via Box-Muller (one value per call).
inline double normal(std::mt19937_64& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// k distinct indices from [0, n), uniformly without replacement, ascending.
inline std::vector<std::size_t> sample_without_replacement(std::mt19937_64& eng, std::size_t n, std::size_t k) {
    k = std::min(k, n);
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    // partial Fisher-Yates
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(eng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace symprune
