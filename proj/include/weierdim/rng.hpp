#pragma once

#include <cstdint>

// Counter-based random numbers: every draw is a pure function of its key and
// counter, so results do not depend on evaluation order or thread count.
namespace weierdim::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash(std::uint64_t key, std::uint64_t counter)
{
    return mix(mix(key) ^ (counter * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t hash(std::uint64_t key, std::uint64_t a, std::uint64_t b)
{
    return hash(hash(key, a), b);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) (Lemire's multiply-high reduction).
constexpr std::uint32_t uniform_below(std::uint64_t h, std::uint32_t n)
{
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(h) * n) >> 64);
}

}  // namespace weierdim::rng
