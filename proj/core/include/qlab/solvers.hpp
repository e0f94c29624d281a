#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qlab/boolfn.hpp"
#include "qlab/distributions.hpp"
#include "qlab/dtree.hpp"
#include "qlab/lp.hpp"
#include "qlab/rational.hpp"

namespace qlab {

// Minimum error any depth-d deterministic tree achieves against mu, together
// with a tree attaining it. Ties are broken toward the smallest query index,
// the smallest label, and a leaf over a query, so the tree is canonical.
struct DistributionalResult {
  Rat error;
  DeterministicTree tree;
};

DistributionalResult distributional_opt_error(const PartialFunction& f, const FiniteDist& mu,
                                              int depth);

// Value of the zero-sum game between a depth-d tree and an input chooser,
// solved by growing both supports until neither side can improve. The value
// equals the optimal worst-case error of a randomized depth-d tree.
struct GameValueResult {
  Rat value;
  int depth = 0;
  int iterations = 0;
  std::vector<std::pair<Bits, Rat>> hard_distribution;
  std::vector<std::pair<DeterministicTree, Rat>> strategy;
};

GameValueResult solve_query_game(const PartialFunction& f, int depth);

// Whether some randomized depth-d tree computes f with error at most eps.
bool randomized_qc_decide(const PartialFunction& f, const Rat& eps, int depth,
                          GameValueResult* detail = nullptr);

// Nonnegative combination of conjunctions approximating f: value within
// [1 - eps, 1] on 1-inputs and [0, eps] on 0-inputs. Weights cover only the
// conjunctions used.
struct JuntaSolution {
  int width = 0;
  Rat t = 1;  // threshold the bands are normalized to
  std::vector<std::pair<Conjunction, Rat>> weights;
};

std::optional<JuntaSolution> conical_junta_feasible(const PartialFunction& f, const Rat& eps,
                                                    int width);

// Smallest width for which the above is feasible; always terminates because
// width = arity admits the exact indicator expansion.
int conical_junta_degree(const PartialFunction& f, const Rat& eps,
                         JuntaSolution* witness = nullptr);

// First conjunction (canonical enumeration order, width up to max_width)
// whose mass under one distribution dominates its mass under the other by
// the factor (1 - eps) / eps.
struct PostbppSearchResult {
  bool found = false;
  Conjunction conj;
  int z = 0;
  Rat mass_z;
  Rat mass_other;
};

PostbppSearchResult postbpp_certificate_search(const FiniteDist& d0, const FiniteDist& d1,
                                               const Rat& eps, int max_width);

}  // namespace qlab
