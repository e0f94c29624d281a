#include "support.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "qlab/bits.hpp"
#include "qlab/lp.hpp"

namespace qlab::test {

Rat slice_mass_by_counting(const Conjunction& c, int m, int k) {
  long hits = 0, total = 0;
  for (std::uint64_t x = 0; x < (1ull << m); ++x) {
    Bits b = bits_from_index(x, m);
    if (weight(b) != k) continue;
    ++total;
    if (c.evaluate(b)) ++hits;
  }
  if (total == 0) throw std::invalid_argument("slice_mass_by_counting: empty slice");
  return make_rat(hits, total);
}

Rat mixture_mass_by_counting(const OuterMixture& d, const Conjunction& c) {
  int n = d.n, m = d.g0.m;
  if (n * m > 20) throw std::invalid_argument("mixture_mass_by_counting: instance too large");

  std::vector<Bits> outers;
  for (std::uint64_t y = 0; y < (1ull << n); ++y) {
    Bits yb = bits_from_index(y, n);
    int w = weight(yb);
    bool in = false;
    switch (d.outer) {
      case OuterMixture::Outer::WeightSlice: in = w == d.param; break;
      case OuterMixture::Outer::Parity: in = w % 2 == d.param; break;
      case OuterMixture::Outer::Full: in = true; break;
    }
    if (in) outers.push_back(std::move(yb));
  }
  if (outers.empty()) throw std::invalid_argument("mixture_mass_by_counting: empty outer class");

  Rat mass = 0;
  for (std::uint64_t x = 0; x < (1ull << (n * m)); ++x) {
    Bits xb = bits_from_index(x, n * m);
    if (!c.evaluate(xb)) continue;
    Rat px = 0;
    for (const Bits& y : outers) {
      Rat p = 1;
      for (int i = 0; i < n && p != 0; ++i) {
        const SliceDistribution& g = y[static_cast<size_t>(i)] ? d.g1 : d.g0;
        Bits blk = block_of(xb, i, m);
        if (weight(blk) != g.k)
          p = 0;
        else
          p /= binomial(m, g.k);
      }
      px += p;
    }
    mass += px / Rat(static_cast<long>(outers.size()));
  }
  return mass;
}

namespace {

std::vector<std::uint64_t> profiles_rec(const PartialFunction& f, const std::vector<Bits>& inputs,
                                        const std::vector<std::uint64_t>& truth, int depth,
                                        std::uint32_t used,
                                        std::map<std::pair<int, std::uint32_t>,
                                                 std::vector<std::uint64_t>>& memo) {
  auto key = std::make_pair(depth, used);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  std::set<std::uint64_t> acc;
  for (std::uint64_t lab = 0; lab < (1ull << f.label_bits()); ++lab) {
    std::uint64_t prof = 0;
    for (size_t i = 0; i < inputs.size(); ++i)
      if (truth[i] != lab) prof |= 1ull << i;
    acc.insert(prof);
  }
  if (depth > 0) {
    for (int q = 0; q < f.arity(); ++q) {
      if (used & (1u << q)) continue;
      std::uint64_t mask1 = 0;
      for (size_t i = 0; i < inputs.size(); ++i)
        if (inputs[i][static_cast<size_t>(q)]) mask1 |= 1ull << i;
      auto sub = profiles_rec(f, inputs, truth, depth - 1, used | (1u << q), memo);
      for (std::uint64_t a : sub)
        for (std::uint64_t b : sub) acc.insert((a & ~mask1) | (b & mask1));
    }
  }
  std::vector<std::uint64_t> res(acc.begin(), acc.end());
  memo[key] = res;
  return res;
}

}  // namespace

Rat full_tree_game_value(const PartialFunction& f, int depth) {
  std::vector<Bits> inputs = promise_inputs(f);
  std::vector<std::uint64_t> truth(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) truth[i] = *f.evaluate(inputs[i]);

  std::map<std::pair<int, std::uint32_t>, std::vector<std::uint64_t>> memo;
  auto profiles = profiles_rec(f, inputs, truth, depth, 0, memo);

  // min over profile mixtures of the max per-input error, as an LP.
  size_t cols = profiles.size();
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  for (size_t i = 0; i < inputs.size(); ++i) {
    std::vector<Rat> row(cols + 1, Rat(0));
    for (size_t j = 0; j < cols; ++j)
      if (profiles[j] & (1ull << i)) row[j] = 1;
    row[cols] = -1;
    A.push_back(std::move(row));
    b.push_back(0);
  }
  std::vector<Rat> ones(cols + 1, Rat(1)), neg(cols + 1, Rat(-1));
  ones[cols] = 0;
  neg[cols] = 0;
  A.push_back(std::move(ones));
  b.push_back(1);
  A.push_back(std::move(neg));
  b.push_back(-1);
  std::vector<Rat> obj(cols + 1, Rat(0));
  obj[cols] = -1;

  auto res = solve_lp_max(A, b, obj);
  if (res.status != LpResult::Status::Optimal)
    throw std::logic_error("full_tree_game_value: LP did not solve");
  return -res.objective;
}

bool fm_feasible(std::vector<std::vector<Rat>> A, std::vector<Rat> b) {
  if (A.empty()) return true;
  size_t vars = A[0].size();
  // x >= 0 joins the system as -x_j <= 0.
  for (size_t j = 0; j < vars; ++j) {
    std::vector<Rat> row(vars, Rat(0));
    row[j] = -1;
    A.push_back(std::move(row));
    b.push_back(0);
  }

  for (size_t elim = 0; elim < vars; ++elim) {
    size_t last = vars - 1 - elim;
    std::vector<std::vector<Rat>> next_A;
    std::vector<Rat> next_b;
    std::vector<size_t> pos, zero, neg_rows;
    for (size_t r = 0; r < A.size(); ++r) {
      if (A[r][last] > 0)
        pos.push_back(r);
      else if (A[r][last] < 0)
        neg_rows.push_back(r);
      else
        zero.push_back(r);
    }
    for (size_t r : zero) {
      std::vector<Rat> row(A[r].begin(), A[r].begin() + static_cast<long>(last));
      next_A.push_back(std::move(row));
      next_b.push_back(b[r]);
    }
    for (size_t rp : pos) {
      for (size_t rn : neg_rows) {
        // scale so the eliminated coefficients cancel
        Rat cp = A[rp][last], cn = -A[rn][last];
        std::vector<Rat> row(last);
        for (size_t j = 0; j < last; ++j) row[j] = Rat(A[rp][j] * cn + A[rn][j] * cp);
        next_A.push_back(std::move(row));
        next_b.push_back(Rat(b[rp] * cn + b[rn] * cp));
      }
    }
    A = std::move(next_A);
    b = std::move(next_b);
  }

  for (const Rat& rhs : b)
    if (rhs < 0) return false;
  return true;
}

}  // namespace qlab::test
