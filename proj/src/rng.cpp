#include "vlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "vlab/error.hpp"

namespace vlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

PhiloxCounter make_counter(std::uint64_t index, std::uint64_t path) {
  return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
          static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
}

PhiloxKey make_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t index) {
  // One Philox block yields a Box-Muller pair: even index -> cos, odd -> sin.
  const auto r = philox4x32_10(make_counter(index >> 1, path), make_key(seed));
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * kTwoPow53Inv;  // (0,1]
  const double u2 = static_cast<double>(b >> 11) * kTwoPow53Inv;          // [0,1)
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

double uniform01(std::uint64_t seed, std::uint64_t path, std::uint64_t index) {
  auto ctr = make_counter(index, path);
  ctr[3] ^= 0x80000000u;  // disjoint from the normal-draw counters
  const auto r = philox4x32_10(ctr, make_key(seed));
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  return static_cast<double>(a >> 11) * kTwoPow53Inv;
}

void brownian_increments(std::uint64_t seed, std::uint64_t path, double dt, int substeps,
                         std::span<double> out) {
  if (substeps < 1) throw DomainError("brownian_increments: substeps must be >= 1");
  const double scale = std::sqrt(dt / substeps);
  std::uint64_t index = 0;
  for (double& dw : out) {
    double acc = 0.0;
    for (int j = 0; j < substeps; ++j) acc += standard_normal(seed, path, index++);
    dw = scale * acc;
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finaliser over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace vlab
