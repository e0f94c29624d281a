#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "qlab/boolfn.hpp"
#include "qlab/dtree.hpp"
#include "qlab/rational.hpp"

namespace qlab {

// Budget wrappers default to 10x the expected query count, so Markov keeps
// the abort probability at most 1/10.
inline constexpr std::uint64_t kBudgetFactor = 10;

// Majority of 5 fresh queries to one coordinate; exactly 5 raw queries.
std::uint8_t vote5(Oracle& o, int index);

// Error probability of vote5 when each query flips with probability nu:
// the upper binomial tail sum_{k>=3} C(5,k) nu^k (1-nu)^(5-k).
// Takes two-sided rates <= 1/3 to effective rates <= 1/4 (17/81 at 1/3).
Rat effective_flip5(const Rat& nu);

// Exact error of an r-vote majority over independent eps-error votes, r odd.
Rat majority_error_exact(int reps, const Rat& eps);

// Smallest odd reps whose Hoeffding bound exp(-2 reps (1/2 - eps)^2) meets
// target; the exact tail is only smaller.
int reps_for_target(const Rat& eps, const Rat& target);

// OR of n bits read through two-sided noise at rates <= 1/3. Each logical
// query is a 5-vote; per coordinate, logical queries repeat until that
// coordinate has answered 0 more often than 1, and a global budget of 6n
// logical queries (30n raw) forces output 1 on exhaustion. Never aborts.
std::optional<std::uint64_t> noisy_or(int n, Oracle& o);
QueryProcedure noisy_or_procedure(int n);

// Walk on {-1, 0, 1, ...} from 0, stepping +1 with probability p. Closed
// forms for the first visit to -1:
//   expected time 1/(1-2p) when p < 1/2, nullopt (infinite) otherwise;
//   visit probability (1-p)/p when p > 1/2, nullopt (certain) otherwise.
std::optional<Rat> walk_hit_time(const Rat& p);
std::optional<Rat> walk_hit_probability(const Rat& p);

// Per-invocation counters of the composition transformer.
struct CompositionStats {
  std::uint64_t outer_queries = 0;
  std::uint64_t inner_runs = 0;
};

struct ComposedProcedure {
  QueryProcedure proc;
  std::shared_ptr<CompositionStats> stats;  // reset at the start of each run
};

// Runs outer against a virtual input whose bit i is the reps-majority of
// inner runs on block i. Every outer query costs exactly reps inner runs.
// Inner aborts count as 0 votes; reps must be odd.
ComposedProcedure compose_amplified(QueryProcedure outer, int n, QueryProcedure inner, int m,
                                    int reps);

// Two GapOr halves of m bits each, exactly one of which carries m/2 ones:
// sample uniform positions until a 1 appears and answer the half it lies in.
// Noiseless queries; expected raw queries 4. Unbudgeted version never errs.
std::optional<std::uint64_t> which_gapor_eval(int m, Oracle& o);
// Budget defaults to kBudgetFactor * 4 raw queries.
QueryProcedure which_gapor_procedure(int m, std::optional<std::uint64_t> budget = std::nullopt);

// n two-bit blocks, each holding exactly one 1, read through one-sided noise
// (rates <= 1/2). Alternating queries inside a block until a 1 appears pin
// the block's value with certainty; fprime is then evaluated on the recovered
// string. Expected raw queries <= 4n.
std::optional<std::uint64_t> zero_sided_which_recover(const PartialFunction& fprime, Oracle& o);
// Budget defaults to kBudgetFactor * 4n raw queries.
QueryProcedure zero_sided_which_procedure(const PartialFunction& fprime,
                                          std::optional<std::uint64_t> budget = std::nullopt);

// One uniform position, answered as read. On gapmaj slices this errs with
// probability exactly 1/3 on both sides; on gapor it errs one-sidedly.
std::optional<std::uint64_t> one_query_sample(int arity, Oracle& o);
QueryProcedure one_query_procedure(int arity);

}  // namespace qlab
