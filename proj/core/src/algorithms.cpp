#include "qlab/algorithms.hpp"

#include <cmath>
#include <stdexcept>

namespace qlab {

std::uint8_t vote5(Oracle& o, int index) {
  int ones = 0;
  for (int i = 0; i < 5; ++i) ones += o.query(index);
  return ones >= 3;
}

Rat effective_flip5(const Rat& nu) {
  if (nu < 0 || nu > 1) throw std::invalid_argument("effective_flip5: rate outside [0,1]");
  Rat total;
  for (unsigned k = 3; k <= 5; ++k)
    total += Rat(binomial(5, k)) * rat_pow(nu, k) * rat_pow(1 - nu, 5 - k);
  return total;
}

Rat majority_error_exact(int reps, const Rat& eps) {
  if (reps <= 0 || reps % 2 == 0) throw std::invalid_argument("majority_error_exact: reps must be odd");
  if (eps < 0 || eps > 1) throw std::invalid_argument("majority_error_exact: eps outside [0,1]");
  Rat total;
  for (int k = (reps + 1) / 2; k <= reps; ++k)
    total += Rat(binomial(reps, k)) * rat_pow(eps, k) * rat_pow(1 - eps, reps - k);
  return total;
}

int reps_for_target(const Rat& eps, const Rat& target) {
  if (eps < 0 || eps >= make_rat(1, 2))
    throw std::invalid_argument("reps_for_target: vote error must be below 1/2");
  if (target <= 0 || target > 1) throw std::invalid_argument("reps_for_target: bad target");
  if (target == 1 || eps == 0) return 1;
  const double gap = to_double(make_rat(1, 2) - eps);
  const double need = std::log(1.0 / to_double(target)) / (2.0 * gap * gap);
  auto r = static_cast<long long>(std::ceil(need));
  if (r < 1) r = 1;
  if (r % 2 == 0) ++r;
  if (r > 1'000'001) throw std::invalid_argument("reps_for_target: unreachable target");
  return static_cast<int>(r);
}

std::optional<std::uint64_t> noisy_or(int n, Oracle& o) {
  if (o.arity() != n) throw std::invalid_argument("noisy_or: oracle arity mismatch");
  const std::uint64_t budget = 6ull * static_cast<std::uint64_t>(n);  // logical queries
  std::uint64_t used = 0;
  for (int i = 0; i < n; ++i) {
    int zeros = 0, ones = 0;
    for (;;) {
      if (vote5(o, i))
        ++ones;
      else
        ++zeros;
      ++used;
      // The break test precedes the budget test on every logical query.
      if (zeros > ones) break;
      if (used == budget) return 1;
    }
  }
  return 0;
}

QueryProcedure noisy_or_procedure(int n) {
  return [n](Oracle& o) { return noisy_or(n, o); };
}

std::optional<Rat> walk_hit_time(const Rat& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("walk_hit_time: p outside [0,1]");
  if (p >= make_rat(1, 2)) return std::nullopt;
  return Rat(1) / (1 - 2 * p);
}

std::optional<Rat> walk_hit_probability(const Rat& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("walk_hit_probability: p outside [0,1]");
  if (p <= make_rat(1, 2)) return std::nullopt;
  return (1 - p) / p;
}

namespace {

// Virtual input whose coordinate i is a reps-majority of inner runs on the
// i-th base block.
class AmplifiedOracle final : public Oracle {
 public:
  AmplifiedOracle(Oracle& base, int n, const QueryProcedure& inner, int m, int reps,
                  CompositionStats& stats)
      : base_(base), n_(n), inner_(inner), m_(m), reps_(reps), stats_(stats) {}

  std::uint8_t query(int index) override {
    if (index < 0 || index >= n_)
      throw std::invalid_argument("AmplifiedOracle::query: index out of range");
    ++stats_.outer_queries;
    int ones = 0;
    for (int r = 0; r < reps_; ++r) {
      BlockOracle blk(base_, index * m_, m_);
      auto v = inner_(blk);
      ++stats_.inner_runs;
      if (v && *v) ++ones;
    }
    return 2 * ones > reps_;
  }

  int arity() const override { return n_; }
  Rng& rng() override { return base_.rng(); }

 private:
  Oracle& base_;
  int n_;
  const QueryProcedure& inner_;
  int m_;
  int reps_;
  CompositionStats& stats_;
};

}  // namespace

ComposedProcedure compose_amplified(QueryProcedure outer, int n, QueryProcedure inner, int m,
                                    int reps) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("compose_amplified: bad block shape");
  if (reps <= 0 || reps % 2 == 0) throw std::invalid_argument("compose_amplified: reps must be odd");
  auto stats = std::make_shared<CompositionStats>();
  QueryProcedure proc = [outer = std::move(outer), inner = std::move(inner), n, m, reps,
                         stats](Oracle& base) -> std::optional<std::uint64_t> {
    if (base.arity() != n * m)
      throw std::invalid_argument("compose_amplified: oracle arity != n*m");
    *stats = {};
    AmplifiedOracle amp(base, n, inner, m, reps, *stats);
    return outer(amp);
  };
  return {std::move(proc), std::move(stats)};
}

std::optional<std::uint64_t> which_gapor_eval(int m, Oracle& o) {
  if (o.arity() != 2 * m) throw std::invalid_argument("which_gapor_eval: oracle arity != 2m");
  for (;;) {
    const int pos = static_cast<int>(o.rng().uniform_below(2ull * m));
    if (o.query(pos)) return pos < m ? 0 : 1;
  }
}

QueryProcedure which_gapor_procedure(int m, std::optional<std::uint64_t> budget) {
  QueryProcedure raw = [m](Oracle& o) { return which_gapor_eval(m, o); };
  return with_budget(std::move(raw), budget.value_or(kBudgetFactor * 4));
}

std::optional<std::uint64_t> zero_sided_which_recover(const PartialFunction& fprime, Oracle& o) {
  const int n = fprime.arity();
  if (o.arity() != 2 * n)
    throw std::invalid_argument("zero_sided_which_recover: oracle arity != 2n");
  Bits y(n);
  for (int i = 0; i < n; ++i) {
    // A reported 1 is certain under one-sided noise, so the first one seen
    // pins this block exactly.
    for (;;) {
      if (o.query(2 * i)) {
        y[i] = 0;
        break;
      }
      if (o.query(2 * i + 1)) {
        y[i] = 1;
        break;
      }
    }
  }
  return fprime.evaluate(y);
}

QueryProcedure zero_sided_which_procedure(const PartialFunction& fprime,
                                          std::optional<std::uint64_t> budget) {
  const std::uint64_t cap =
      budget.value_or(kBudgetFactor * 4ull * static_cast<std::uint64_t>(fprime.arity()));
  QueryProcedure raw = [fprime](Oracle& o) { return zero_sided_which_recover(fprime, o); };
  return with_budget(std::move(raw), cap);
}

std::optional<std::uint64_t> one_query_sample(int arity, Oracle& o) {
  if (o.arity() != arity) throw std::invalid_argument("one_query_sample: oracle arity mismatch");
  const int pos = static_cast<int>(o.rng().uniform_below(static_cast<std::uint64_t>(arity)));
  return o.query(pos);
}

QueryProcedure one_query_procedure(int arity) {
  return [arity](Oracle& o) { return one_query_sample(arity, o); };
}

}  // namespace qlab
