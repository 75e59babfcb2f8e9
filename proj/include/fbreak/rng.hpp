#pragma once

#include <cstdint>
#include <random>

namespace fbreak {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; bijective mixing of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream-per-replication seed: replication r of base seed s draws from
// an engine seeded with mix64(mix64(s) ^ mix64(r + golden)).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(mix64(base) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Engine(seq);
}

} // namespace fbreak
