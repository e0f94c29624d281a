#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "qlab/rational.hpp"

namespace qlab {

// Deterministic stream: identical (seed) or (seed, trial) always replays the
// same draws, independent of what other trials or threads are doing.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    eng_.seed(seq);
  }

  // Per-trial stream for trial-parallel simulation.
  static Rng for_trial(std::uint64_t seed, std::uint64_t trial) {
    Rng r(0);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    r.eng_.seed(seq);
    return r;
  }

  std::uint64_t next() { return eng_(); }

  // Unbiased uniform draw from [0, n).
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: empty range");
    if ((n & (n - 1)) == 0) return next() & (n - 1);
    const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
    const std::uint64_t bound = 0 - rem;    // largest multiple of n
    for (;;) {
      std::uint64_t r = next();
      if (r < bound) return r % n;
    }
  }

  // Exact Bernoulli(num/den); den == 0 is rejected, num >= den always true.
  bool bernoulli_raw(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("bernoulli_raw: zero denominator");
    if (num == 0) return false;
    if (num >= den) return true;
    return uniform_below(den) < num;
  }

  bool bernoulli(const Rat& p) {
    if (p < 0 || p > 1) throw std::invalid_argument("bernoulli: probability outside [0,1]");
    if (!p.get_num().fits_ulong_p() || !p.get_den().fits_ulong_p())
      throw std::invalid_argument("bernoulli: denominator too large for exact sampling");
    return bernoulli_raw(p.get_num().get_ui(), p.get_den().get_ui());
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qlab
