#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ombb {

using Rng = std::mt19937_64;

/// splitmix64 step; used both as a stand-alone mixer and to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes a base seed with run coordinates into one engine seed, so that
/// every (algorithm, n, kappa, trial) cell of a sweep gets an independent,
/// reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t algorithm_id,
                              std::uint64_t n, std::uint64_t kappa,
                              std::uint64_t trial) {
    std::uint64_t s = base;
    for (std::uint64_t v : {algorithm_id, n, kappa, trial}) {
        s ^= splitmix64(s) + v;
        (void)splitmix64(s);
    }
    return splitmix64(s);
}

/// Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
/// draw unbiased and the result depends only on the engine state.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

inline bool coin(Rng& rng) { return (rng() & 1u) != 0; }

/// Chooses k distinct elements from items, uniformly over k-subsets.
/// Partial Fisher-Yates; items is taken by value on purpose.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k,
                                          Rng& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(
                                uniform_below(rng, items.size() - i));
        std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
}

}  // namespace ombb
