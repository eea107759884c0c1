#pragma once

#include <cstdint>
#include <random>

namespace sseqkit_test {

extern std::uint64_t g_seed;

/// Generator for one test, derived from --seed (default 0) and a per-test salt.
inline std::mt19937_64 rng(std::uint64_t salt)
{
    std::seed_seq seq{g_seed, salt};
    return std::mt19937_64(seq);
}

inline std::int64_t uniform(std::mt19937_64& g, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

}  // namespace sseqkit_test
