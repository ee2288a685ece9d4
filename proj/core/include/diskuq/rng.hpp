#pragma once

#include <cstdint>
#include <random>

namespace diskuq {

/// Deterministic per-task RNG: a master seed plus a stream id give
/// independent generators, so parallel replications stay reproducible.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    const std::uint64_t mixed = stream ^ 0x9e3779b97f4a7c15ull;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace diskuq
