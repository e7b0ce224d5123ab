#ifndef RUMTEST_RNG_HPP
#define RUMTEST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "rumtest/errors.hpp"

namespace rumtest {

/// Deterministic stream RNG with explicit splitting.
///
/// A stream is identified by a root seed plus a path of integers
/// (e.g. {replication, budget}). The state is derived by hashing the
/// path with splitmix64, so streams are reproducible regardless of
/// thread scheduling or the order in which they are created. Output
/// is generated by xoshiro-style splitmix64 counter iteration, which
/// is adequate for Monte Carlo work and has no shared state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {})
      : state_(mix(seed ^ 0x9e3779b97f4a7c15ULL)) {
    for (auto p : path) state_ = mix(state_ ^ mix(p + 0xbf58476d1ce4e5b9ULL));
  }

  /// Child stream for a sub-task; does not advance this stream.
  RngStream split(std::uint64_t key) const {
    RngStream child(*this);
    child.state_ = mix(state_ ^ mix(key + 0x94d049bb133111ebULL));
    child.has_spare_ = false;
    return child;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform draw on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo is fine here; n is tiny relative to 2^64.
    return next_u64() % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586477 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Categorical draw from unnormalized nonnegative weights.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw InternalError("categorical: weights sum to zero");
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rumtest

#endif
