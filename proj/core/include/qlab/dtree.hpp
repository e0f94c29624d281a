#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qlab/bits.hpp"
#include "qlab/boolfn.hpp"
#include "qlab/rational.hpp"
#include "qlab/rng.hpp"

namespace qlab {

// Input-bit corruption applied freshly on every query.
//   None:     answers are exact.
//   TwoSided: bit i flips with probability exactly nu[i], nu[i] <= 1/3.
//   OneSided: a true 0 is always reported; a true 1 reads 0 with probability
//             nu[i], nu[i] <= 1/2.
// Only these definitional caps are enforced here; algorithms wanting stricter
// noise check it themselves.
struct NoiseModel {
  enum class Kind { None, TwoSided, OneSided };
  Kind kind = Kind::None;
  std::vector<Rat> nu;

  static NoiseModel none();
  static NoiseModel two_sided(std::vector<Rat> nu);
  static NoiseModel one_sided(std::vector<Rat> nu);
  void validate(int arity) const;
};

struct QueryRecord {
  int index;
  std::uint8_t answer;
};

struct BudgetExhausted {};  // thrown when a BudgetOracle runs out of raw queries

// Query interface an algorithm drives. rng() is the trial's coin stream, for
// procedures that randomize beyond the input noise.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::uint8_t query(int index) = 0;
  virtual int arity() const = 0;
  virtual Rng& rng() = 0;
};

// Answers queries about one fixed input under a noise model, counting raw
// queries globally and per coordinate.
class InputOracle final : public Oracle {
 public:
  InputOracle(const Bits& input, const NoiseModel& noise, Rng& rng, bool record = false);

  std::uint8_t query(int index) override;
  int arity() const override { return static_cast<int>(input_.size()); }
  Rng& rng() override { return rng_; }

  std::uint64_t raw_count() const { return raw_count_; }
  const std::vector<std::uint32_t>& per_coordinate_counts() const { return per_coord_; }
  const std::vector<QueryRecord>& transcript() const { return transcript_; }

 private:
  const Bits& input_;
  NoiseModel::Kind kind_;
  // Exact per-coordinate coin (num, den).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> coins_;
  Rng& rng_;
  bool record_;
  std::uint64_t raw_count_ = 0;
  std::vector<std::uint32_t> per_coord_;
  std::vector<QueryRecord> transcript_;
};

// View of base coordinates [offset, offset+width).
class BlockOracle final : public Oracle {
 public:
  BlockOracle(Oracle& base, int offset, int width);
  std::uint8_t query(int index) override;
  int arity() const override { return width_; }
  Rng& rng() override { return base_.rng(); }

 private:
  Oracle& base_;
  int offset_;
  int width_;
};

// Passes queries through until max_raw of them have been spent, then throws
// BudgetExhausted.
class BudgetOracle final : public Oracle {
 public:
  BudgetOracle(Oracle& base, std::uint64_t max_raw) : base_(base), left_(max_raw) {}
  std::uint8_t query(int index) override {
    if (left_ == 0) throw BudgetExhausted{};
    --left_;
    return base_.query(index);
  }
  int arity() const override { return base_.arity(); }
  Rng& rng() override { return base_.rng(); }

 private:
  Oracle& base_;
  std::uint64_t left_;
};

// An algorithm is a resumable procedure driving an oracle; nullopt output is
// the abort symbol.
using QueryProcedure = std::function<std::optional<std::uint64_t>(Oracle&)>;

// Runs proc under a raw-query budget; exhaustion turns into an abort output.
QueryProcedure with_budget(QueryProcedure proc, std::uint64_t max_raw);

// Binary decision tree with optional abort leaves. Nodes live in a pool;
// node 0 is the root.
class DeterministicTree {
 public:
  struct Node {
    int query = -1;  // -1 marks a leaf
    int left = -1;   // next node when the queried bit is 0
    int right = -1;  // when it is 1
    std::optional<std::uint64_t> label;  // leaf output; nullopt = abort
  };

  static DeterministicTree leaf(std::optional<std::uint64_t> label);
  // Children are whole trees, spliced into one pool.
  static DeterministicTree internal(int query, const DeterministicTree& on0,
                                    const DeterministicTree& on1);

  int depth() const;
  bool is_perfect(int r) const;  // every leaf at depth exactly r
  DeterministicTree pad_to_perfect(int r) const;

  // Noiseless evaluation straight off the input.
  std::optional<std::uint64_t> evaluate(const Bits& x) const;
  // Evaluation through an oracle; one raw query per internal node visited.
  std::optional<std::uint64_t> run(Oracle& o) const;

  // Visit leaves left-to-right with their root paths as (query, bit) pairs.
  void for_each_leaf(
      const std::function<void(const std::vector<std::pair<int, std::uint8_t>>&,
                               const std::optional<std::uint64_t>&)>& fn) const;

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
  int append(const DeterministicTree& sub);
};

// Convex combination of deterministic trees.
struct RandomizedTree {
  std::vector<std::pair<DeterministicTree, Rat>> support;

  RandomizedTree() = default;
  explicit RandomizedTree(std::vector<std::pair<DeterministicTree, Rat>> support_);
  int depth() const;
};

struct Adversary {
  std::string id;
  Bits input;
  NoiseModel noise;
};

// One adversary's Monte Carlo summary. errors counts every trial whose output
// differs from f(input), aborts included; aborts is broken out separately.
struct RunReport {
  std::string algorithm;
  std::string function;
  std::string adversary_id;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t aborts = 0;
  double error_rate = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::uint64_t max_raw_queries = 0;
  double mean_raw_queries = 0;
  std::uint64_t seed = 0;
  double confidence = 0;
};

// Trial t draws its own stream from (seed, t), so results do not depend on
// execution order; threads > 1 splits trials into ranges, threads == 0 asks
// the hardware.
RunReport estimate_error(const std::string& algorithm, const QueryProcedure& proc,
                         const PartialFunction& f, const Adversary& adv, std::uint64_t trials,
                         std::uint64_t seed, double confidence = 0.99, unsigned threads = 1);

// Two-sided Clopper-Pearson interval for k errors in n trials.
std::pair<double, double> binomial_confidence(std::uint64_t k, std::uint64_t n, double confidence);

}  // namespace qlab
