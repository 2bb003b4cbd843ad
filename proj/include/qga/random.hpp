#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace qga {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class T>
const T& pick(Rng& rng, std::span<const T> items) {
    return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items.size()) - 1))];
}

}  // namespace qga
