#pragma once

// Counter-based random numbers.
//
// Every random quantity in the library is a pure function of a 64-bit key and
// a 64-bit counter, so streams can be sampled at arbitrary index ranges and in
// any order with identical results. The construction is bit-exact and meant to
// be reproducible from other languages:
//
//   GOLDEN   = 0x9E3779B97F4A7C15
//   mix64(z) = SplitMix64 finalizer:
//                z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                return z ^ (z >> 31)
//   combine(a, b) = mix64(mix64(a) + GOLDEN * (b + 1))        (mod 2^64)
//   uniform(u)    = (u >> 11) * 2^-53                          in [0, 1)
//
// Replication seeds are combine(combine(base_seed, grid_index), rep_index).

#include <cstdint>

namespace mslln::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(mix64(a) + kGolden * (b + 1));
}

// Maps signed indices onto the counter space without collisions.
constexpr std::uint64_t zigzag(std::int64_t v) noexcept {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

constexpr double to_unit(std::uint64_t u) noexcept {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t grid_index,
                                         std::uint64_t rep_index) noexcept {
    return combine(combine(base_seed, grid_index), rep_index);
}

}  // namespace mslln::rng
