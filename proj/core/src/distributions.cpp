#include "qlab/distributions.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qlab {

namespace {

void check_sorted_disjoint(const std::vector<int>& pos, const std::vector<int>& neg) {
  auto sorted_unique = [](const std::vector<int>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] >= v[i + 1]) return false;
    return true;
  };
  if (!sorted_unique(pos) || !sorted_unique(neg))
    throw std::invalid_argument("Conjunction: literal indices must be sorted and distinct");
  for (int i : pos)
    if (std::binary_search(neg.begin(), neg.end(), i))
      throw std::invalid_argument("Conjunction: index appears with both signs");
  if ((!pos.empty() && pos.front() < 0) || (!neg.empty() && neg.front() < 0))
    throw std::invalid_argument("Conjunction: negative variable index");
}

}  // namespace

Conjunction::Conjunction(std::vector<int> pos_idx, std::vector<int> neg_idx)
    : pos(std::move(pos_idx)), neg(std::move(neg_idx)) {
  check_sorted_disjoint(pos, neg);
}

bool Conjunction::evaluate(const Bits& x) const {
  for (int i : pos) {
    if (i >= static_cast<int>(x.size())) throw std::invalid_argument("Conjunction: index out of range");
    if (!x[i]) return false;
  }
  for (int i : neg) {
    if (i >= static_cast<int>(x.size())) throw std::invalid_argument("Conjunction: index out of range");
    if (x[i]) return false;
  }
  return true;
}

std::string Conjunction::to_string() const {
  if (width() == 0) return "true";
  // Merge the two sorted lists so literals appear in index order, 1-based.
  std::ostringstream os;
  std::size_t ip = 0, in = 0;
  bool first = true;
  while (ip < pos.size() || in < neg.size()) {
    bool take_pos = in == neg.size() || (ip < pos.size() && pos[ip] < neg[in]);
    if (!first) os << ",";
    if (take_pos)
      os << "+" << pos[ip++] + 1;
    else
      os << "-" << neg[in++] + 1;
    first = false;
  }
  return os.str();
}

Conjunction Conjunction::parse(const std::string& text) {
  if (text.empty() || text == "true") return {};
  std::vector<int> pos, neg;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.size() < 2 || (item[0] != '+' && item[0] != '-') ||
        item.find_first_not_of("0123456789", 1) != std::string::npos)
      throw std::invalid_argument("Conjunction::parse: malformed literal '" + item + "'");
    int idx = std::stoi(item.substr(1)) - 1;
    if (idx < 0) throw std::invalid_argument("Conjunction::parse: indices are 1-based");
    (item[0] == '+' ? pos : neg).push_back(idx);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  return {std::move(pos), std::move(neg)};
}

namespace {

// Emit all sign patterns for one support set.
void emit_signs(const std::vector<int>& support,
                const std::function<void(const Conjunction&)>& fn) {
  const int w = static_cast<int>(support.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << w); ++mask) {
    std::vector<int> pos, neg;
    for (int j = 0; j < w; ++j) ((mask >> j) & 1u ? neg : pos).push_back(support[j]);
    fn(Conjunction(std::move(pos), std::move(neg)));
  }
}

void supports_rec(int arity, int w, int start, std::vector<int>& cur,
                  const std::function<void(const Conjunction&)>& fn) {
  if (static_cast<int>(cur.size()) == w) {
    emit_signs(cur, fn);
    return;
  }
  for (int i = start; i <= arity - (w - static_cast<int>(cur.size())); ++i) {
    cur.push_back(i);
    supports_rec(arity, w, i + 1, cur, fn);
    cur.pop_back();
  }
}

}  // namespace

void for_each_conjunction(int arity, int max_width,
                          const std::function<void(const Conjunction&)>& fn) {
  if (arity < 0 || max_width < 0) throw std::invalid_argument("for_each_conjunction: negative size");
  if (max_width > arity) max_width = arity;
  std::vector<int> cur;
  for (int w = 0; w <= max_width; ++w) supports_rec(arity, w, 0, cur, fn);
}

std::vector<Conjunction> enumerate_conjunctions(int arity, int max_width) {
  std::vector<Conjunction> out;
  for_each_conjunction(arity, max_width, [&](const Conjunction& c) { out.push_back(c); });
  return out;
}

Int count_conjunctions(int arity, int max_width) {
  if (max_width > arity) max_width = arity;
  Int total = 0;
  for (int w = 0; w <= max_width; ++w) {
    Int term = binomial(arity, w);
    mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), w);
    total += term;
  }
  return total;
}

Conjunction random_conjunction(Rng& rng, int arity, int max_width) {
  if (max_width > arity) max_width = arity;
  const int w = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_width) + 1));
  // Partial Fisher-Yates over the index pool gives a uniform w-subset.
  std::vector<int> pool(arity);
  for (int i = 0; i < arity; ++i) pool[i] = i;
  std::vector<int> pos, neg;
  for (int j = 0; j < w; ++j) {
    std::size_t pick = j + rng.uniform_below(arity - j);
    std::swap(pool[j], pool[pick]);
    (rng.next() & 1u ? neg : pos).push_back(pool[j]);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  return {std::move(pos), std::move(neg)};
}

SliceDistribution::SliceDistribution(int m_, int k_) : m(m_), k(k_) {
  if (m <= 0 || k < 0 || k > m)
    throw std::invalid_argument("SliceDistribution: need 0 <= k <= m, m > 0");
}

Rat conj_prob_slice(int u, int v, int m, int k) {
  if (u < 0 || v < 0 || u + v > m) throw std::invalid_argument("conj_prob_slice: bad literal counts");
  if (k - u < 0 || k - u > m - u - v) return {};
  return make_rat(binomial(m - u - v, k - u), binomial(m, k));
}

Rat conj_prob(const SliceDistribution& d, const Conjunction& c) {
  if (!c.pos.empty() && c.pos.back() >= d.m)
    throw std::invalid_argument("conj_prob: conjunction exceeds slice arity");
  if (!c.neg.empty() && c.neg.back() >= d.m)
    throw std::invalid_argument("conj_prob: conjunction exceeds slice arity");
  return conj_prob_slice(static_cast<int>(c.pos.size()), static_cast<int>(c.neg.size()), d.m, d.k);
}

int BlockProduct::arity() const {
  int a = 0;
  for (const auto& b : blocks) a += b.m;
  return a;
}

std::vector<Conjunction> split_blocks(const Conjunction& c, int n, int m) {
  std::vector<std::vector<int>> pos(n), neg(n);
  auto place = [&](int idx, std::vector<std::vector<int>>& dst) {
    if (idx >= n * m) throw std::invalid_argument("split_blocks: index out of range");
    dst[idx / m].push_back(idx % m);
  };
  for (int i : c.pos) place(i, pos);
  for (int i : c.neg) place(i, neg);
  std::vector<Conjunction> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.emplace_back(std::move(pos[i]), std::move(neg[i]));
  return out;
}

Rat conj_prob(const BlockProduct& d, const Conjunction& c) {
  // Blocks may have unequal sizes, so locate literals by running offsets.
  std::vector<std::vector<int>> pos(d.blocks.size()), neg(d.blocks.size());
  auto place = [&](int idx, std::vector<std::vector<int>>& dst) {
    int off = 0;
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
      if (idx < off + d.blocks[b].m) {
        dst[b].push_back(idx - off);
        return;
      }
      off += d.blocks[b].m;
    }
    throw std::invalid_argument("conj_prob: index out of range");
  };
  for (int idx : c.pos) place(idx, pos);
  for (int idx : c.neg) place(idx, neg);
  Rat p(1);
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    p *= conj_prob(d.blocks[b], Conjunction(std::move(pos[b]), std::move(neg[b])));
    if (p == 0) return p;
  }
  return p;
}

OuterMixture OuterMixture::weight_slice(int n, SliceDistribution g0, SliceDistribution g1, int s) {
  if (g0.m != g1.m) throw std::invalid_argument("OuterMixture: block lengths differ");
  if (n <= 0 || s < 0 || s > n) throw std::invalid_argument("OuterMixture: bad outer weight");
  return {n, g0, g1, Outer::WeightSlice, s};
}

OuterMixture OuterMixture::parity(int n, SliceDistribution g0, SliceDistribution g1, int z) {
  if (g0.m != g1.m) throw std::invalid_argument("OuterMixture: block lengths differ");
  if (n <= 0 || (z != 0 && z != 1)) throw std::invalid_argument("OuterMixture: bad parity");
  return {n, g0, g1, Outer::Parity, z};
}

OuterMixture OuterMixture::full(int n, SliceDistribution g0, SliceDistribution g1) {
  if (g0.m != g1.m) throw std::invalid_argument("OuterMixture: block lengths differ");
  if (n <= 0) throw std::invalid_argument("OuterMixture: bad block count");
  return {n, g0, g1, Outer::Full, 0};
}

namespace {

// Per-block probabilities under g0 and g1.
void block_probs(const OuterMixture& d, const Conjunction& c, std::vector<Rat>& t0,
                 std::vector<Rat>& t1) {
  auto parts = split_blocks(c, d.n, d.g0.m);
  t0.resize(d.n);
  t1.resize(d.n);
  for (int i = 0; i < d.n; ++i) {
    t0[i] = conj_prob(d.g0, parts[i]);
    t1[i] = conj_prob(d.g1, parts[i]);
  }
}

}  // namespace

Rat conj_prob(const OuterMixture& d, const Conjunction& c) {
  std::vector<Rat> t0, t1;
  block_probs(d, c, t0, t1);
  switch (d.outer) {
    case OuterMixture::Outer::Full: {
      Rat p(1);
      for (int i = 0; i < d.n; ++i) p *= (t0[i] + t1[i]) / 2;
      return p;
    }
    case OuterMixture::Outer::Parity: {
      // Sum over a parity class = (prod of sums +/- prod of differences)/2.
      Rat s(1), diff(1);
      for (int i = 0; i < d.n; ++i) {
        s *= t0[i] + t1[i];
        diff *= t0[i] - t1[i];
      }
      Rat total = d.param == 0 ? Rat(s + diff) : Rat(s - diff);
      total /= 2;
      Rat count = rat_pow(Rat(2), d.n - 1);
      return total / count;
    }
    case OuterMixture::Outer::WeightSlice: {
      const int s = d.param;
      // DP over blocks: coefficient of z^s in prod (t0_i + t1_i z).
      std::vector<Rat> e(s + 1);
      e[0] = 1;
      for (int i = 0; i < d.n; ++i) {
        for (int j = std::min(s, i + 1); j >= 1; --j) e[j] = e[j] * t0[i] + e[j - 1] * t1[i];
        e[0] *= t0[i];
      }
      return e[s] / Rat(binomial(d.n, s));
    }
  }
  throw std::logic_error("conj_prob: unhandled outer class");
}

Rat conj_prob_outer_sum(const OuterMixture& d, const Conjunction& c) {
  if (d.n > 24) throw std::invalid_argument("conj_prob_outer_sum: outer arity too large");
  std::vector<Rat> t0, t1;
  block_probs(d, c, t0, t1);
  Rat total;
  Int count = 0;
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << d.n); ++y) {
    const int wt = __builtin_popcountll(y);
    bool in_class = false;
    switch (d.outer) {
      case OuterMixture::Outer::Full: in_class = true; break;
      case OuterMixture::Outer::Parity: in_class = (wt & 1) == d.param; break;
      case OuterMixture::Outer::WeightSlice: in_class = wt == d.param; break;
    }
    if (!in_class) continue;
    Rat prod(1);
    for (int i = 0; i < d.n; ++i) prod *= ((y >> i) & 1u) ? t1[i] : t0[i];
    total += prod;
    count += 1;
  }
  if (count == 0) throw std::logic_error("conj_prob_outer_sum: empty outer class");
  return total / Rat(count);
}

FiniteDist::FiniteDist(int arity_, std::vector<std::pair<Bits, Rat>> atoms_)
    : arity(arity_), atoms(std::move(atoms_)) {
  Rat total;
  for (const auto& [x, w] : atoms) {
    if (static_cast<int>(x.size()) != arity)
      throw std::invalid_argument("FiniteDist: atom arity mismatch");
    if (w <= 0) throw std::invalid_argument("FiniteDist: weights must be positive");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("FiniteDist: weights must sum to 1");
}

FiniteDist FiniteDist::from_slice(const SliceDistribution& d) {
  if (d.m > 24) throw std::invalid_argument("FiniteDist::from_slice: arity too large");
  std::vector<std::pair<Bits, Rat>> atoms;
  const Rat w = make_rat(Int(1), binomial(d.m, d.k));
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << d.m); ++idx) {
    if (__builtin_popcountll(idx) != d.k) continue;
    atoms.emplace_back(bits_from_index(idx, d.m), w);
  }
  return {d.m, std::move(atoms)};
}

FiniteDist FiniteDist::mix(const Rat& w0, const FiniteDist& d0, const Rat& w1,
                           const FiniteDist& d1) {
  if (d0.arity != d1.arity) throw std::invalid_argument("FiniteDist::mix: arity mismatch");
  if (w0 < 0 || w1 < 0 || w0 + w1 != 1)
    throw std::invalid_argument("FiniteDist::mix: weights must be a convex pair");
  std::vector<std::pair<Bits, Rat>> atoms;
  for (const auto& [x, w] : d0.atoms)
    if (w0 > 0) atoms.emplace_back(x, w0 * w);
  for (const auto& [x, w] : d1.atoms)
    if (w1 > 0) atoms.emplace_back(x, w1 * w);
  return {d0.arity, std::move(atoms)};
}

Rat conj_prob(const FiniteDist& d, const Conjunction& c) {
  Rat p;
  for (const auto& [x, w] : d.atoms)
    if (c.evaluate(x)) p += w;
  return p;
}

std::vector<Rat> elementary_symmetric(const std::vector<Rat>& vals, int up_to) {
  if (up_to < 0) throw std::invalid_argument("elementary_symmetric: negative order");
  std::vector<Rat> e(up_to + 1);
  e[0] = 1;
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (int j = std::min<int>(up_to, static_cast<int>(i) + 1); j >= 1; --j)
      e[j] += e[j - 1] * vals[i];
  return e;
}

}  // namespace qlab
