#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dphalf {

// Deterministic random source. std::mt19937_64 output is fixed by the
// standard, and every distribution transform below is written out
// explicitly, so a given seed yields the same stream on every platform
// (std::normal_distribution and friends are implementation-defined and
// deliberately avoided).
//
// A generator is single-owner: one per training run. Concurrent
// consumers (one-vs-rest classes, feature maps) derive independent
// child generators via child(); the derivation rule is fixed:
//   child_seed = seed XOR (0x9E3779B97F4A7C15 * (stream_index + 1))
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  SeededRng child(std::uint64_t stream_index) const {
    return SeededRng(seed_ ^ (kGoldenGamma * (stream_index + 1)));
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller. Exactly two engine draws per call —
  // no cached spare, so the stream position is a pure function of the
  // number of calls made.
  double gaussian() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // N(0, sigma^2). sigma == 0 is the degenerate point mass at zero and
  // consumes no randomness.
  double gaussian(double sigma) {
    if (sigma == 0.0) return 0.0;
    return sigma * gaussian();
  }

  // Laplace with scale b via inverse CDF (density (1/2b) exp(-|x|/b)).
  double laplace(double b) {
    const double u = uniform_open() - 0.5;
    return -b * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
  }

  // Standard Gumbel, for Gumbel-max sampling over log-weights.
  double gumbel() { return -std::log(-std::log(uniform_open())); }

 private:
  static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dphalf
