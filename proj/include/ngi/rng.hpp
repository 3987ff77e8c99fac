#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "ngi/types.hpp"

namespace ngi {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// A (seed, stream) pair plus a block index deterministically names four
/// 32-bit words, so parallel consumers never share state. Stream s is used
/// for Monte Carlo realization s, retrieval restart s, and so on; results
/// are independent of worker scheduling by construction.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static Block block(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    Block c = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
               static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return rounds(c, k0, k1);
  }

  /// Raw keyed form, exposed for the known-answer tests.
  static Block rounds(Block c, std::uint32_t k0, std::uint32_t k1) {
    for (int r = 0; r < 10; ++r) {
      c = round_once(c, k0, k1);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return c;
  }

 private:
  static Block round_once(Block c, std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint64_t kM0 = 0xD2511F53ull;
    constexpr std::uint64_t kM1 = 0xCD9E8D57ull;
    std::uint64_t p0 = kM0 * c[0];
    std::uint64_t p1 = kM1 * c[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
  }
};

/// Buffered double stream over Philox blocks. One instance per (seed, stream);
/// cheap to construct, no shared state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  /// Uniform in the open interval (0, 1).
  double uniform() {
    if (have_ == 0) refill();
    --have_;
    std::uint64_t u = pending_[have_];
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal pair via Box-Muller.
  void gaussian_pair(double& g0, double& g1) {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    g0 = r * std::cos(kTwoPi * u2);
    g1 = r * std::sin(kTwoPi * u2);
  }

  /// Circular complex Gaussian with the given mean square modulus.
  cd complex_gaussian(double mean_sq_modulus) {
    double g0, g1;
    gaussian_pair(g0, g1);
    double s = std::sqrt(mean_sq_modulus / 2.0);
    return {s * g0, s * g1};
  }

 private:
  void refill() {
    auto b = Philox::block(seed_, stream_, index_++);
    pending_[0] = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    pending_[1] = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    have_ = 2;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  std::uint64_t pending_[2] = {0, 0};
  int have_ = 0;
};

}  // namespace ngi
