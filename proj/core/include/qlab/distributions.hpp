#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qlab/bits.hpp"
#include "qlab/rational.hpp"
#include "qlab/rng.hpp"

namespace qlab {

// AND of literals over 0-based variable indices; pos and neg are sorted and
// disjoint. Width 0 is the always-true conjunction.
struct Conjunction {
  std::vector<int> pos;
  std::vector<int> neg;

  Conjunction() = default;
  Conjunction(std::vector<int> pos_idx, std::vector<int> neg_idx);

  int width() const { return static_cast<int>(pos.size() + neg.size()); }
  bool evaluate(const Bits& x) const;

  // Signed 1-based index list, e.g. "+3,-7,-12"; "true" when empty.
  std::string to_string() const;
  static Conjunction parse(const std::string& text);

  bool operator==(const Conjunction&) const = default;
};

// Canonical order: width ascending, then support sets lexicographically, then
// sign patterns counting up with 0 = all-positive (bit j negates the j-th
// smallest support index). Callback streaming keeps big sweeps allocation-free.
void for_each_conjunction(int arity, int max_width,
                          const std::function<void(const Conjunction&)>& fn);
std::vector<Conjunction> enumerate_conjunctions(int arity, int max_width);
Int count_conjunctions(int arity, int max_width);

// Uniform width in [0, max_width], then uniform support and signs.
Conjunction random_conjunction(Rng& rng, int arity, int max_width);

// Uniform distribution over weight-k strings in {0,1}^m.
struct SliceDistribution {
  int m = 0;
  int k = 0;
  SliceDistribution(int m_, int k_);
};

// Probability that a conjunction with u positive and v negative literals holds
// under SliceDistribution(m, k): C(m-u-v, k-u) / C(m, k); zero off-range.
Rat conj_prob_slice(int u, int v, int m, int k);
Rat conj_prob(const SliceDistribution& d, const Conjunction& c);

// Independent slices on consecutive blocks.
struct BlockProduct {
  std::vector<SliceDistribution> blocks;
  int arity() const;
};
Rat conj_prob(const BlockProduct& d, const Conjunction& c);

// Mixture over block products G_y = prod_i G_{y_i}, with the outer string y
// drawn from a weight slice of {0,1}^n, a parity class, or all of {0,1}^n.
struct OuterMixture {
  enum class Outer { WeightSlice, Parity, Full };
  int n = 0;
  SliceDistribution g0;
  SliceDistribution g1;
  Outer outer = Outer::Full;
  int param = 0;  // target weight, or parity in {0,1}

  static OuterMixture weight_slice(int n, SliceDistribution g0, SliceDistribution g1, int s);
  static OuterMixture parity(int n, SliceDistribution g0, SliceDistribution g1, int z);
  static OuterMixture full(int n, SliceDistribution g0, SliceDistribution g1);
  int arity() const { return n * g0.m; }
};

// Closed-form route: per-block literal counts, then a weight DP, a parity
// product identity, or a plain product.
Rat conj_prob(const OuterMixture& d, const Conjunction& c);
// Summation route over the outer class; must agree with the closed form.
Rat conj_prob_outer_sum(const OuterMixture& d, const Conjunction& c);

// Explicit finite distribution; weights positive, summing to one.
struct FiniteDist {
  int arity = 0;
  std::vector<std::pair<Bits, Rat>> atoms;

  FiniteDist() = default;
  FiniteDist(int arity_, std::vector<std::pair<Bits, Rat>> atoms_);
  static FiniteDist from_slice(const SliceDistribution& d);
  static FiniteDist mix(const Rat& w0, const FiniteDist& d0, const Rat& w1, const FiniteDist& d1);
};
Rat conj_prob(const FiniteDist& d, const Conjunction& c);

// Per-block restriction of c, indices rebased to [0, m).
std::vector<Conjunction> split_blocks(const Conjunction& c, int n, int m);

// e_0..e_up_to of vals, by the standard one-pass DP.
std::vector<Rat> elementary_symmetric(const std::vector<Rat>& vals, int up_to);

}  // namespace qlab
