#include "qlab/solvers.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace qlab {

namespace {

struct Restriction {
  std::uint64_t mask;  // queried coordinates
  std::uint64_t vals;  // their answers, within mask
  bool operator==(const Restriction&) const = default;
};

struct RestrictionHash {
  size_t operator()(const Restriction& r) const {
    return std::hash<std::uint64_t>{}(r.mask * 0x9e3779b97f4a7c15ull ^ r.vals);
  }
};

struct DpEntry {
  Rat error;               // unnormalized mass answered incorrectly
  int action = -1;         // query index, or -1 for a leaf
  std::uint64_t label = 0;
};

class DistributionalDp {
 public:
  DistributionalDp(const PartialFunction& f, const FiniteDist& mu, int depth) : depth_(depth) {
    atoms_.reserve(mu.atoms.size());
    for (const auto& [x, w] : mu.atoms) {
      auto label = f.evaluate(x);
      if (!label)
        throw std::invalid_argument("distributional_opt_error: distribution leaves the promise");
      std::uint64_t packed = 0;
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i]) packed |= 1ull << i;
      atoms_.push_back({packed, *label, w});
    }
    arity_ = mu.arity;
    if (arity_ > 63) throw std::invalid_argument("distributional_opt_error: arity above 63");
  }

  const DpEntry& solve(Restriction r) {
    auto it = memo_.find(r);
    if (it != memo_.end()) return it->second;

    // Mass per label among atoms consistent with the restriction.
    std::map<std::uint64_t, Rat> mass;
    Rat total = 0;
    for (const auto& a : atoms_) {
      if ((a.packed & r.mask) != r.vals) continue;
      mass[a.label] += a.weight;
      total += a.weight;
    }

    DpEntry best;
    best.error = total;
    for (const auto& [label, m] : mass) {
      if (total - m < best.error) {
        best.error = total - m;
        best.label = label;
      }
    }

    int left = depth_ - std::popcount(r.mask);
    if (left > 0 && best.error > 0) {
      for (int i = 0; i < arity_; ++i) {
        std::uint64_t bit = 1ull << i;
        if (r.mask & bit) continue;
        Rat err = solve({r.mask | bit, r.vals}).error +
                  solve({r.mask | bit, r.vals | bit}).error;
        if (err < best.error) {
          best.error = err;
          best.action = i;
        }
      }
    }
    return memo_.emplace(r, std::move(best)).first->second;
  }

  DeterministicTree build(Restriction r) {
    const DpEntry& e = solve(r);
    if (e.action < 0) return DeterministicTree::leaf(e.label);
    std::uint64_t bit = 1ull << e.action;
    return DeterministicTree::internal(e.action, build({r.mask | bit, r.vals}),
                                       build({r.mask | bit, r.vals | bit}));
  }

 private:
  int depth_;
  int arity_;
  struct Atom {
    std::uint64_t packed;
    std::uint64_t label;
    Rat weight;
  };
  std::vector<Atom> atoms_;
  std::unordered_map<Restriction, DpEntry, RestrictionHash> memo_;
};

}  // namespace

DistributionalResult distributional_opt_error(const PartialFunction& f, const FiniteDist& mu,
                                              int depth) {
  if (depth < 0) throw std::invalid_argument("distributional_opt_error: negative depth");
  if (mu.arity != f.arity())
    throw std::invalid_argument("distributional_opt_error: arity mismatch");
  DistributionalDp dp(f, mu, depth);
  DistributionalResult res;
  res.error = dp.solve({0, 0}).error;
  res.tree = dp.build({0, 0});
  return res;
}

GameValueResult solve_query_game(const PartialFunction& f, int depth) {
  if (depth < 0) throw std::invalid_argument("solve_query_game: negative depth");
  std::vector<Bits> inputs = promise_inputs(f);
  if (inputs.empty()) throw std::invalid_argument("solve_query_game: empty promise");
  std::vector<std::uint64_t> label(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) label[i] = *f.evaluate(inputs[i]);

  std::vector<size_t> active = {0};
  std::vector<char> in_active(inputs.size(), 0);
  in_active[0] = 1;
  std::vector<DeterministicTree> trees;
  trees.push_back(DeterministicTree::leaf(label[0]));

  // Precomputed 0/1 error of each tree against each input.
  std::vector<std::vector<Rat>> err_col;  // per tree, indexed by input
  auto push_tree_errors = [&](const DeterministicTree& t) {
    std::vector<Rat> e(inputs.size());
    for (size_t i = 0; i < inputs.size(); ++i) {
      auto out = t.evaluate(inputs[i]);
      e[i] = (out && *out == label[i]) ? Rat(0) : Rat(1);
    }
    err_col.push_back(std::move(e));
  };
  push_tree_errors(trees[0]);

  GameValueResult res;
  res.depth = depth;
  for (int iter = 1;; ++iter) {
    if (iter > 100000) throw std::logic_error("solve_query_game: support growth did not stop");
    res.iterations = iter;

    std::vector<std::vector<Rat>> payoff(active.size(), std::vector<Rat>(trees.size()));
    for (size_t i = 0; i < active.size(); ++i)
      for (size_t j = 0; j < trees.size(); ++j) payoff[i][j] = err_col[j][active[i]];
    GameSolution game = solve_matrix_game(payoff);

    // Best response for the input chooser, over the whole promise.
    size_t worst = 0;
    Rat worst_err = -1;
    for (size_t i = 0; i < inputs.size(); ++i) {
      Rat e = 0;
      for (size_t j = 0; j < trees.size(); ++j)
        if (game.col_mix[j] != 0) e += game.col_mix[j] * err_col[j][i];
      if (e > worst_err) {
        worst_err = e;
        worst = i;
      }
    }

    // Best response for the tree player, against the current hard mixture.
    std::vector<std::pair<Bits, Rat>> atoms;
    for (size_t i = 0; i < active.size(); ++i)
      if (game.row_mix[i] != 0) atoms.emplace_back(inputs[active[i]], game.row_mix[i]);
    DistributionalResult br = distributional_opt_error(f, FiniteDist(f.arity(), atoms), depth);

    if (br.error > game.value || game.value > worst_err)
      throw std::logic_error("solve_query_game: weak duality violated");

    if (br.error == game.value && game.value == worst_err) {
      res.value = game.value;
      for (size_t i = 0; i < active.size(); ++i)
        if (game.row_mix[i] != 0)
          res.hard_distribution.emplace_back(inputs[active[i]], game.row_mix[i]);
      for (size_t j = 0; j < trees.size(); ++j)
        if (game.col_mix[j] != 0) res.strategy.emplace_back(trees[j], game.col_mix[j]);
      return res;
    }

    if (worst_err > game.value && !in_active[worst]) {
      active.push_back(worst);
      in_active[worst] = 1;
    }
    if (br.error < game.value) {
      trees.push_back(br.tree);
      push_tree_errors(trees.back());
    }
  }
}

bool randomized_qc_decide(const PartialFunction& f, const Rat& eps, int depth,
                          GameValueResult* detail) {
  GameValueResult res = solve_query_game(f, depth);
  bool ok = res.value <= eps;
  if (detail) *detail = std::move(res);
  return ok;
}

std::optional<JuntaSolution> conical_junta_feasible(const PartialFunction& f, const Rat& eps,
                                                    int width) {
  if (f.label_bits() != 1)
    throw std::invalid_argument("conical_junta_feasible: needs a single-bit function");
  if (eps < 0 || eps >= 1) throw std::invalid_argument("conical_junta_feasible: eps outside [0,1)");
  if (count_conjunctions(f.arity(), width) > 200000)
    throw std::invalid_argument("conical_junta_feasible: conjunction set too large");

  std::vector<Conjunction> conjs = enumerate_conjunctions(f.arity(), width);
  std::vector<Bits> inputs = promise_inputs(f);

  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  for (const Bits& x : inputs) {
    std::vector<Rat> row(conjs.size());
    for (size_t j = 0; j < conjs.size(); ++j) row[j] = conjs[j].evaluate(x) ? 1 : 0;
    if (*f.evaluate(x) == 1) {
      // 1 - eps <= value <= 1.
      A.push_back(row);
      b.push_back(Rat(1));
      for (auto& v : row) v = -v;
      A.push_back(std::move(row));
      b.push_back(eps - 1);
    } else {
      // value <= eps; the lower bound 0 holds for free.
      A.push_back(std::move(row));
      b.push_back(eps);
    }
  }

  LpResult lp = solve_lp_max(A, b, std::vector<Rat>(conjs.size(), Rat(0)));
  if (lp.status != LpResult::Status::Optimal) return std::nullopt;
  JuntaSolution sol;
  sol.width = width;
  for (size_t j = 0; j < conjs.size(); ++j)
    if (lp.x[j] != 0) sol.weights.emplace_back(conjs[j], lp.x[j]);
  return sol;
}

int conical_junta_degree(const PartialFunction& f, const Rat& eps, JuntaSolution* witness) {
  for (int w = 0;; ++w) {
    if (w > f.arity()) throw std::logic_error("conical_junta_degree: full width infeasible");
    auto sol = conical_junta_feasible(f, eps, w);
    if (sol) {
      if (witness) *witness = std::move(*sol);
      return w;
    }
  }
}

PostbppSearchResult postbpp_certificate_search(const FiniteDist& d0, const FiniteDist& d1,
                                               const Rat& eps, int max_width) {
  if (d0.arity != d1.arity)
    throw std::invalid_argument("postbpp_certificate_search: arity mismatch");
  if (eps <= 0 || eps >= make_rat(1, 2))
    throw std::invalid_argument("postbpp_certificate_search: eps outside (0, 1/2)");

  PostbppSearchResult res;
  for (const Conjunction& c : enumerate_conjunctions(d0.arity, max_width)) {
    for (int z = 0; z < 2; ++z) {
      Rat mz = conj_prob(z == 0 ? d0 : d1, c);
      if (mz == 0) continue;
      Rat mo = conj_prob(z == 0 ? d1 : d0, c);
      if (eps * mz >= (1 - eps) * mo) {
        res.found = true;
        res.conj = c;
        res.z = z;
        res.mass_z = mz;
        res.mass_other = mo;
        return res;
      }
    }
  }
  return res;
}

}  // namespace qlab
