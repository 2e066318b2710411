#pragma once

#include <cstdint>
#include <random>

namespace froc {

using Rng = std::mt19937_64;

// Stream families derived from one master seed.
enum class StreamKind : std::uint64_t {
    Dataset = 1,    // simulated dataset for replication r
    Bootstrap = 2,  // bootstrap seed for replication r
    Oracle = 3,     // Monte Carlo oracle chunk c
    Resample = 4,   // bootstrap replicate b
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based split: the seed of stream (kind, index) depends only on the
// master seed and the counters, never on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, StreamKind kind, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(kind))) + index);
}

inline Rng make_stream(std::uint64_t master, StreamKind kind, std::uint64_t index) {
    return Rng(stream_seed(master, kind, index));
}

}  // namespace froc
