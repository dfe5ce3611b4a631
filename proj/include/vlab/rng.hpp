#pragma once

// Counter-based random numbers: Philox4x32-10 keyed by the seed, with the
// (path, draw index) pair as counter. Any draw can be regenerated without
// touching a stream, so results do not depend on how paths are scheduled.

#include <array>
#include <cstdint>
#include <span>

namespace vlab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Standard normal number `index` of the stream of `path` under `seed`.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t index);

/// Uniform in [0,1) from the same keyed stream family (independent tag).
double uniform01(std::uint64_t seed, std::uint64_t path, std::uint64_t index);

/// Brownian increments over `out.size()` steps of length dt. Each increment
/// is the sum of `substeps` finer increments, so grids refined by an integer
/// factor see the same Brownian path.
void brownian_increments(std::uint64_t seed, std::uint64_t path, double dt, int substeps,
                         std::span<double> out);

/// Derived seed for an independent family (e.g. a fresh evaluation run).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace vlab
