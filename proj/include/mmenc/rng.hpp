#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmenc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a named sub-stream of a root seed, e.g. stream_seed(seed, {tag, point, batch}).
/// The result depends only on the arguments, never on scheduling order.
inline std::uint64_t stream_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(root);
    for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

inline Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> path = {}) {
    return Rng(stream_seed(root, path));
}

// Stream tags.
inline constexpr std::uint64_t kStreamSynth = 0x73796e7468ULL;
inline constexpr std::uint64_t kStreamBer = 0x626572ULL;
inline constexpr std::uint64_t kStreamEm = 0x656dULL;

} // namespace mmenc
