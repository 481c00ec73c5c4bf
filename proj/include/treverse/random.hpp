#pragma once

#include <cstdint>
#include <random>

namespace treverse {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-stream seeds from a
/// master seed and a counter.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t master, std::uint64_t counter) {
    return Rng{mix_seed(master, counter)};
}

}  // namespace treverse
