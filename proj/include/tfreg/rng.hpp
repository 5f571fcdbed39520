#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tfreg/errors.hpp"

namespace tfreg {

// splitmix64 step; used to derive independent per-stage seeds from one
// master seed so that reruns with the same seed are reproducible.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x51ed2701a9e5f3b7ULL));
}

// Unbiased draw from [0, bound). Rejection sampling on top of mt19937_64;
// std::uniform_int_distribution is implementation-defined, this is not.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw ContractError("uniform_below: bound must be positive");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

// Fisher-Yates shuffle driven by uniform_below, stable across platforms.
template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Uniform k-subset of {0,...,n-1}, returned sorted ascending.
inline std::vector<std::int32_t> sample_without_replacement(std::int64_t n,
                                                            std::int64_t k,
                                                            std::mt19937_64& rng) {
    if (k < 0 || n < 0 || k > n)
        throw ContractError("sample_without_replacement: need 0 <= k <= n");
    std::vector<std::int32_t> pool(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    // partial Fisher-Yates: after i swaps the prefix is a uniform i-subset
    for (std::int64_t i = 0; i < k; ++i) {
        std::uint64_t j = i + uniform_below(rng, static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace tfreg
