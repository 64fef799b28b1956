#pragma once

// Reproducible randomness.
//
// Every random draw in the library comes from std::mt19937_64, whose output
// sequence is fixed by the C++ standard. Seeds are scrambled with SplitMix64
// and bounded integers are drawn by rejection sampling, so results are
// identical across compilers and standard libraries (the standard
// distributions are implementation-defined and are not used).

#include <cstdint>
#include <random>

namespace hedono::random {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

// Independent stream for work item `index` of a run seeded with `seed`.
inline Engine make_stream(std::uint64_t seed, std::uint64_t index) {
    return Engine(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace hedono::random
