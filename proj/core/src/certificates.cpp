#include "qlab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qlab {

namespace {

// All index subsets of [0, m) with size <= max_size, sizes ascending, each
// set in sorted order.
void for_each_subset(int m, int max_size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (remaining == 0) {
      fn(cur);
      return;
    }
    for (int i = start; i + remaining <= m; ++i) {
      cur.push_back(i);
      rec(i + 1, remaining - 1);
      cur.pop_back();
    }
  };
  for (int size = 0; size <= std::min(m, max_size); ++size) rec(0, size);
}

bool width_regime(int n, int m, int width) {
  double cap = std::floor(n * std::log2(double(n)) / 16.0);
  return width <= cap && double(m) >= std::log2(double(n));
}

}  // namespace

std::optional<Conjunction> path_conjunction(const std::vector<std::pair<int, std::uint8_t>>& path) {
  std::map<int, std::uint8_t> seen;
  for (const auto& [idx, bit] : path) {
    auto it = seen.find(idx);
    if (it != seen.end()) {
      if (it->second != bit) return std::nullopt;
      continue;
    }
    seen.emplace(idx, bit);
  }
  std::vector<int> pos, neg;
  for (const auto& [idx, bit] : seen) (bit ? pos : neg).push_back(idx);
  return Conjunction(std::move(pos), std::move(neg));
}

RatioSweepReport verify_gapmaj_ratio(int m, int max_width) {
  if (m <= 0 || m % 3 != 0) throw std::invalid_argument("verify_gapmaj_ratio: m not divisible by 3");
  SliceDistribution g0(m, m / 3), g1(m, 2 * m / 3);

  RatioSweepReport rep;
  rep.worst_ratio = 0;
  int cap = std::min(max_width, m / 7);
  for_each_conjunction(m, cap, [&](const Conjunction& c) {
    if (!rep.pass) return;
    Rat mass[2] = {conj_prob(g0, c), conj_prob(g1, c)};
    Rat bound = rat_pow(3, c.width());
    for (int z = 0; z < 2; ++z) {
      ++rep.checked;
      if (mass[z] > bound * mass[1 - z]) {
        rep.pass = false;
        rep.worst_conj = c;
        rep.worst_z = z;
        return;
      }
      if (mass[1 - z] > 0 && mass[z] > rep.worst_ratio * mass[1 - z]) {
        rep.worst_ratio = mass[z] / mass[1 - z];
        rep.worst_conj = c;
        rep.worst_z = z;
      }
    }
  });
  return rep;
}

GaporFactsReport verify_gapor_facts(int m, int max_width) {
  if (m <= 0 || m % 2 != 0) throw std::invalid_argument("verify_gapor_facts: m not even");
  SliceDistribution g0(m, 0), g1(m, m / 2);

  GaporFactsReport rep;
  for_each_conjunction(m, max_width, [&](const Conjunction& c) {
    ++rep.indicator_checked;
    Rat mass = conj_prob(g0, c);
    if (mass != 0 && mass != 1) {
      rep.indicator_pass = false;
      rep.worst_conj = c;
    }
  });

  bool margin_set = false;
  for_each_subset(m, m / 4, [&](const std::vector<int>& support) {
    Conjunction c({}, support);
    ++rep.lower_bound_checked;
    Rat margin = rat_pow(3, c.width()) * conj_prob(g1, c);
    if (margin < 1) rep.lower_bound_pass = false;
    if (!margin_set || margin < rep.worst_margin) {
      margin_set = true;
      rep.worst_margin = margin;
      rep.worst_conj = c;
    }
  });
  return rep;
}

FourierCheckReport xor_fourier_check(int n, int m, const Conjunction& conj) {
  if (n < 1 || m < 1) throw std::invalid_argument("xor_fourier_check: sizes must be positive");
  SliceDistribution g0(m, m / 3), g1(m, m - m / 3);

  FourierCheckReport rep;
  rep.dec.n = n;
  rep.dec.m = m;
  rep.dec.cd = 1;
  rep.dec.prod_a = 1;
  std::vector<Conjunction> per_block = split_blocks(conj, n, m);
  for (int i = 0; i < n; ++i) {
    Rat t0 = conj_prob(g0, per_block[i]);
    Rat t1 = conj_prob(g1, per_block[i]);
    Rat base = (t0 + t1) / 2;
    Rat a = base > 0 ? (t0 - t1) / (t0 + t1) : Rat(0);
    rep.dec.base.push_back(base);
    rep.dec.a.push_back(a);
    rep.dec.chi_support.push_back(i);
    rep.dec.cd *= base;
    rep.dec.prod_a *= a;
  }

  rep.cd0 = rep.dec.cd * (1 + rep.dec.prod_a);
  rep.cd1 = rep.dec.cd * (1 - rep.dec.prod_a);
  rep.cd0_sum = conj_prob(OuterMixture::parity(n, g0, g1, 0), conj);
  rep.cd1_sum = conj_prob(OuterMixture::parity(n, g0, g1, 1), conj);
  if (rep.cd0 != rep.cd0_sum || rep.cd1 != rep.cd1_sum)
    throw std::logic_error("xor_fourier_check: evaluation routes disagree");

  Rat abs_prod = rep.dec.prod_a < 0 ? -rep.dec.prod_a : rep.dec.prod_a;
  rep.product_bound_ok = 4 * abs_prod <= 1;
  rep.band_ok = rep.dec.cd == 0 ||
                (3 * rep.cd1 > 2 * rep.dec.cd && 3 * rep.cd1 < 4 * rep.dec.cd);
  return rep;
}

MajCaseReport maj_case_from_values(int n, const std::vector<char>& in_B,
                                   const std::vector<Rat>& c) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("maj_case_from_values: n must be even");
  if (static_cast<int>(in_B.size()) != n || static_cast<int>(c.size()) != n)
    throw std::invalid_argument("maj_case_from_values: need one flag and one value per block");
  for (const Rat& v : c)
    if (v < 0 || v > 1) throw std::invalid_argument("maj_case_from_values: c outside [0,1]");

  MajCaseReport rep;
  MajCaseDecomposition& dec = rep.dec;
  dec.n = n;
  dec.c = c;
  dec.widths.assign(n, 0);
  dec.c_B = 1;
  std::vector<Rat> c_A;
  for (int i = 0; i < n; ++i) {
    if (in_B[i]) {
      dec.blocks_B.push_back(i);
      dec.c_B *= c[i];
    } else {
      dec.blocks_A.push_back(i);
      c_A.push_back(c[i]);
    }
  }
  const long nB = static_cast<long>(dec.blocks_B.size());
  const long nA = n - nB;
  dec.s = n / 2 - 1 - nB;

  int esym_up = static_cast<int>(std::max(0l, std::min(nA, n / 2 + 1 - nB)));
  std::vector<Rat> esym = elementary_symmetric(c_A, esym_up);
  for (int zeta = 0; zeta < 3; ++zeta) {
    long wt = n / 2 - 1 + zeta;
    long sz = wt - nB;
    if (sz < 0 || sz > nA) continue;
    dec.p[zeta] = make_rat(binomial(nA, sz), binomial(n, wt));
    dec.q_defined[zeta] = true;
    dec.q[zeta] = make_rat(Int(1), binomial(nA, sz)) * esym[sz];
    dec.cd[zeta] = dec.p[zeta] * dec.c_B * dec.q[zeta];
  }

  // Hypergeometric coverage identities, valid unconditionally.
  if (dec.p[0] * (n / 2) != dec.p[1] * (n / 2 - nB) ||
      dec.p[1] * (n / 2 + 1) != dec.p[2] * (n / 2 + 1 - nB))
    throw std::logic_error("maj_case_from_values: coverage identity failed");

  if (dec.q_defined[1] && dec.q_defined[2])
    rep.q_ratio_ok = dec.q[1] > 0 && dec.q[1] * dec.q[1] <= n * dec.q[2] * dec.q[2];

  // Resampling split of q_2: enumerate the base subsets S_0 when that is
  // small enough, tracking the iid-pair and duplicate-pair averages.
  if (dec.s >= 0 && dec.s <= nA && binomial(nA, dec.s) <= 200000) {
    const long extras = nA - dec.s;  // always n/2 + 1
    Rat sum_base = 0, sum_one = 0, sum_star = 0, sum_err = 0;
    std::vector<int> idx;
    std::function<void(int, long)> rec = [&](int start, long remaining) {
      if (remaining == 0) {
        Rat prod = 1;
        for (int i : idx) prod *= c_A[i];
        Rat mean = 0, mean_sq = 0;
        size_t pos = 0;
        for (long i = 0; i < nA; ++i) {
          if (pos < idx.size() && idx[pos] == i) {
            ++pos;
            continue;
          }
          mean += c_A[i];
          mean_sq += c_A[i] * c_A[i];
        }
        mean /= extras;
        mean_sq /= extras;
        sum_base += prod;
        sum_one += prod * mean;
        sum_star += prod * mean * mean;
        sum_err += prod * mean_sq;
        return;
      }
      for (int i = start; i + remaining <= nA; ++i) {
        idx.push_back(i);
        rec(i + 1, remaining - 1);
        idx.pop_back();
      }
    };
    rec(0, dec.s);

    Rat count = make_rat(Int(1), binomial(nA, dec.s));
    Rat q0_enum = sum_base * count;
    Rat q1_enum = sum_one * count;
    dec.q2_star = sum_star * count;
    dec.q2_err = sum_err * count;
    dec.resample_checked = true;
    if ((dec.q_defined[0] && q0_enum != dec.q[0]) || (dec.q_defined[1] && q1_enum != dec.q[1]))
      throw std::logic_error("maj_case_from_values: subset enumeration disagrees with the DP");
    if (dec.q_defined[2]) {
      Rat w_dup = make_rat(1, extras);
      if (dec.q2_star != (1 - w_dup) * dec.q[2] + w_dup * dec.q2_err)
        throw std::logic_error("maj_case_from_values: resampling identity failed");
    }
    rep.err_term_dominated = dec.q_defined[1] && dec.q2_err <= dec.q[1];
  }

  if (3 * dec.cd[0] > dec.cd[1])
    rep.branch = MajBranch::Zeta0Large;
  else if (3 * dec.cd[2] > 4 * dec.cd[1])
    rep.branch = MajBranch::Zeta2Large;
  else if (dec.cd[1] == 0)
    rep.branch = MajBranch::MiddleZero;
  return rep;
}

MajCaseReport maj_case_analysis(int n, int m, const Conjunction& conj) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("maj_case_analysis: m must be even");
  SliceDistribution g0(m, 0), g1(m, m / 2);
  std::vector<Conjunction> per_block = split_blocks(conj, n, m);

  std::vector<char> in_B(n);
  std::vector<Rat> c(n);
  std::vector<int> widths(n);
  for (int i = 0; i < n; ++i) {
    Rat t0 = conj_prob(g0, per_block[i]);
    if (t0 != 0 && t0 != 1)
      throw std::logic_error("maj_case_analysis: weight-0 slice mass not an indicator");
    in_B[i] = t0 == 0;
    c[i] = conj_prob(g1, per_block[i]);
    widths[i] = per_block[i].width();
  }

  MajCaseReport rep = maj_case_from_values(n, in_B, c);
  rep.dec.widths = widths;

  for (int zeta = 0; zeta < 3; ++zeta) {
    OuterMixture d = OuterMixture::weight_slice(n, g0, g1, n / 2 - 1 + zeta);
    if (conj_prob(d, conj) != rep.dec.cd[zeta])
      throw std::logic_error("maj_case_analysis: factorization disagrees with the mixture DP");
  }

  rep.q_ratio_in_regime = width_regime(n, m, conj.width());
  if (rep.q_ratio_in_regime) {
    if (rep.dec.q_defined[1] && rep.dec.q_defined[2] && !rep.q_ratio_ok)
      throw std::logic_error("maj_case_analysis: q ratio failed inside the width regime");
    if (rep.branch == MajBranch::None)
      throw std::logic_error("maj_case_analysis: no branch holds inside the width regime");
  } else if (rep.branch == MajBranch::None) {
    rep.outside_regime_candidate = true;
  }
  return rep;
}

bool maj_subset_mean_hypothesis(int n, const std::vector<char>& in_B, const std::vector<Rat>& c) {
  if (n < 2 || n % 2 != 0 || static_cast<int>(in_B.size()) != n ||
      static_cast<int>(c.size()) != n)
    throw std::invalid_argument("maj_subset_mean_hypothesis: malformed instance");
  std::vector<Rat> c_A;
  for (int i = 0; i < n; ++i)
    if (!in_B[i]) c_A.push_back(c[i]);
  if (static_cast<int>(c_A.size()) < n / 2 + 1) return false;  // needs |B| < n/2
  std::sort(c_A.begin(), c_A.end());
  Rat sum = 0;
  for (int i = 0; i < n / 2; ++i) sum += c_A[i];
  return 4 * sum * sum >= n;
}

bool verify_sym_inequality(const std::vector<Rat>& alphas, const std::vector<Rat>& betas) {
  if (alphas.size() != betas.size())
    throw std::invalid_argument("verify_sym_inequality: length mismatch");
  Rat sum_a = 0, sum_ab = 0, sum_abb = 0;
  for (size_t k = 0; k < alphas.size(); ++k) {
    if (alphas[k] < 0 || betas[k] < 0)
      throw std::invalid_argument("verify_sym_inequality: negative entry");
    sum_a += alphas[k];
    sum_ab += alphas[k] * betas[k];
    sum_abb += alphas[k] * betas[k] * betas[k];
  }
  if (sum_ab == 0) throw std::invalid_argument("verify_sym_inequality: all alpha*beta zero");
  return sum_abb * sum_a >= sum_ab * sum_ab;
}

void OutcomeTable::validate() const {
  Rat total = 0;
  for (const Row& r : rows) {
    if (r.prob < 0) throw std::invalid_argument("OutcomeTable: negative probability");
    for (const Rat& v : r.value)
      if (v < 0) throw std::invalid_argument("OutcomeTable: negative value");
    total += r.prob;
  }
  if (total != 1) throw std::invalid_argument("OutcomeTable: probabilities do not sum to 1");
}

size_t select_outcome(const OutcomeTable& table, const Rat& eps) {
  table.validate();
  if (eps <= 0 || 10 * eps > 1) throw std::invalid_argument("select_outcome: eps outside (0, 1/10]");
  Rat e0 = 0, e1 = 0, e2 = 0;
  for (const auto& r : table.rows) {
    e0 += r.prob * r.value[0];
    e1 += r.prob * r.value[1];
    e2 += r.prob * r.value[2];
  }
  if (e0 > eps || e1 < 1 - eps || e2 > 1)
    throw std::invalid_argument("select_outcome: expectation premises violated");

  // delta = 2 sqrt(eps): v0 <= delta v1 iff v0^2 <= 4 eps v1^2, and
  // v2 <= (1+delta) v1 iff v2 <= v1 or (v2-v1)^2 <= 4 eps v1^2.
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& v = table.rows[i].value;
    if (v[1] <= 0) continue;
    if (v[0] * v[0] > 4 * eps * v[1] * v[1]) continue;
    if (v[2] > v[1] && (v[2] - v[1]) * (v[2] - v[1]) > 4 * eps * v[1] * v[1]) continue;
    return i;
  }
  throw std::logic_error("select_outcome: premises hold but no outcome qualifies");
}

PostselectionCertificate extract_postselection_certificate(const RandomizedTree& rt,
                                                           const FiniteDist& d0,
                                                           const FiniteDist& d1, const Rat& eps) {
  if (d0.arity != d1.arity)
    throw std::invalid_argument("extract_postselection_certificate: arity mismatch");
  if (eps < 0 || 2 * eps >= 1)
    throw std::invalid_argument("extract_postselection_certificate: eps outside [0, 1/2)");
  if (rt.support.empty())
    throw std::invalid_argument("extract_postselection_certificate: empty tree support");

  // Error conditioned on not aborting, averaged over each distribution.
  for (int z = 0; z < 2; ++z) {
    Rat alive = 0, wrong = 0;
    for (const auto& [x, w] : (z == 0 ? d0 : d1).atoms) {
      for (const auto& [tree, weight] : rt.support) {
        auto out = tree.evaluate(x);
        if (!out) continue;
        alive += w * weight;
        if (*out != static_cast<std::uint64_t>(z)) wrong += w * weight;
      }
    }
    if (alive == 0 || wrong > eps * alive)
      throw std::invalid_argument("extract_postselection_certificate: conditional error above eps");
  }

  int r = rt.depth();
  PostselectionCertificate cert;
  bool found = false;
  for (const auto& [tree, weight] : rt.support) {
    if (found) break;
    DeterministicTree padded = tree.pad_to_perfect(r);
    padded.for_each_leaf([&](const std::vector<std::pair<int, std::uint8_t>>& path,
                             const std::optional<std::uint64_t>& label) {
      if (found || !label) return;
      if (*label > 1)
        throw std::invalid_argument("extract_postselection_certificate: labels must be bits");
      auto conj = path_conjunction(path);
      if (!conj) return;
      int z = static_cast<int>(*label);
      Rat mass_z = conj_prob(z == 0 ? d0 : d1, *conj);
      if (mass_z == 0) return;
      Rat mass_other = conj_prob(z == 0 ? d1 : d0, *conj);
      if (eps * mass_z >= (1 - eps) * mass_other) {
        cert = {*conj, z, mass_z, mass_other};
        found = true;
      }
    });
  }
  if (!found)
    throw std::logic_error("extract_postselection_certificate: no leaf qualifies");
  return cert;
}

WappCertificate extract_wapp_certificate(const RandomizedTree& rt, const Rat& t,
                                         const FiniteDist& d0, const FiniteDist& d1,
                                         const FiniteDist& d2, const Rat& eps) {
  if (d0.arity != d1.arity || d1.arity != d2.arity)
    throw std::invalid_argument("extract_wapp_certificate: arity mismatch");
  if (t <= 0 || t > 1) throw std::invalid_argument("extract_wapp_certificate: threshold outside (0, 1]");
  if (rt.support.empty())
    throw std::invalid_argument("extract_wapp_certificate: empty tree support");

  int r = rt.depth();
  Rat leaf_weight = 1 / rat_pow(2, r);
  Rat scale = rat_pow(2, r) / t;

  OutcomeTable table;
  std::vector<std::optional<Conjunction>> conj_of;
  std::vector<std::array<Rat, 3>> mass_of;
  for (const auto& [tree, weight] : rt.support) {
    DeterministicTree padded = tree.pad_to_perfect(r);
    padded.for_each_leaf([&](const std::vector<std::pair<int, std::uint8_t>>& path,
                             const std::optional<std::uint64_t>& label) {
      OutcomeTable::Row row;
      row.prob = weight * leaf_weight;
      row.value = {Rat(0), Rat(0), Rat(0)};
      std::optional<Conjunction> conj;
      std::array<Rat, 3> mass = {Rat(0), Rat(0), Rat(0)};
      if (label && *label == 1) {
        conj = path_conjunction(path);
        if (conj) {
          mass = {conj_prob(d0, *conj), conj_prob(d1, *conj), conj_prob(d2, *conj)};
          for (int j = 0; j < 3; ++j) row.value[j] = scale * mass[j];
        }
      }
      table.rows.push_back(std::move(row));
      conj_of.push_back(std::move(conj));
      mass_of.push_back(mass);
    });
  }

  size_t pick = select_outcome(table, eps);
  if (!conj_of[pick])
    throw std::logic_error("extract_wapp_certificate: selected outcome has no conjunction");
  return {*conj_of[pick], mass_of[pick][0], mass_of[pick][1], mass_of[pick][2], eps};
}

}  // namespace qlab
