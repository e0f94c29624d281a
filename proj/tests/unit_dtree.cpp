#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qlab/boolfn.hpp"
#include "qlab/certificates.hpp"
#include "qlab/dtree.hpp"
#include "qlab/rational.hpp"
#include "qlab/rng.hpp"
#include "support.hpp"

using namespace qlab;

TEST_CASE("noise model validation") {
  CHECK_NOTHROW(NoiseModel::none().validate(5));
  CHECK_NOTHROW(NoiseModel::two_sided({make_rat(1, 3), Rat(0)}).validate(2));
  CHECK_THROWS_AS(NoiseModel::two_sided({make_rat(2, 5)}).validate(1), std::invalid_argument);
  CHECK_NOTHROW(NoiseModel::one_sided({make_rat(1, 2)}).validate(1));
  CHECK_THROWS_AS(NoiseModel::one_sided({make_rat(3, 5)}).validate(1), std::invalid_argument);
  // arity mismatch
  CHECK_THROWS_AS(NoiseModel::two_sided({Rat(0)}).validate(2), std::invalid_argument);
}

TEST_CASE("one-sided noise never misreports a 0") {
  Bits zeros(4, false);
  Rng rng(3);
  InputOracle o(zeros, NoiseModel::one_sided({make_rat(1, 2), make_rat(1, 2), make_rat(1, 2),
                                              make_rat(1, 2)}),
                rng);
  for (int t = 0; t < 2000; ++t) CHECK(o.query(t % 4) == 0);
  CHECK(o.raw_count() == 2000);
}

TEST_CASE("two-sided noise flips at the configured rate") {
  Bits ones(1, true);
  ones[0] = true;
  Rng rng(11);
  InputOracle o(ones, NoiseModel::two_sided({make_rat(1, 3)}), rng);
  const int trials = 30000;
  int zeros_seen = 0;
  for (int t = 0; t < trials; ++t)
    if (o.query(0) == 0) ++zeros_seen;
  double rate = static_cast<double>(zeros_seen) / trials;
  double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / trials);
  CHECK(std::abs(rate - 1.0 / 3) < 4 * sigma);
}

TEST_CASE("oracle counts and transcripts") {
  Bits x = bits_from_index(0b011, 3);
  Rng rng(1);
  InputOracle o(x, NoiseModel::none(), rng, true);
  CHECK(o.query(1) == 1);
  CHECK(o.query(2) == 0);
  CHECK(o.query(1) == 1);
  CHECK(o.raw_count() == 3);
  CHECK(o.per_coordinate_counts()[1] == 2);
  CHECK(o.per_coordinate_counts()[0] == 0);
  REQUIRE(o.transcript().size() == 3);
  CHECK(o.transcript()[0].index == 1);
  CHECK(o.transcript()[1].answer == 0);

  BlockOracle blk(o, 1, 2);
  CHECK(blk.arity() == 2);
  CHECK(blk.query(0) == 1);  // base coordinate 1
  CHECK(o.raw_count() == 4);
}

TEST_CASE("budget oracle throws and with_budget converts to abort") {
  Bits x(2, true);
  Rng rng(7);
  InputOracle base(x, NoiseModel::none(), rng);
  BudgetOracle tight(base, 2);
  CHECK(tight.query(0) == 1);
  CHECK(tight.query(1) == 1);
  CHECK_THROWS_AS(tight.query(0), BudgetExhausted);

  QueryProcedure greedy = [](Oracle& o) -> std::optional<std::uint64_t> {
    for (int i = 0; i < 100; ++i) o.query(0);
    return 1;
  };
  InputOracle fresh(x, NoiseModel::none(), rng);
  CHECK(!with_budget(greedy, 5)(fresh).has_value());
  CHECK(fresh.raw_count() == 5);
}

TEST_CASE("tree construction, depth, evaluation") {
  auto leaf0 = DeterministicTree::leaf(0);
  auto leaf1 = DeterministicTree::leaf(1);
  CHECK(leaf0.depth() == 0);
  CHECK(leaf0.evaluate(Bits(3, false)) == 0);

  // query x2, then x1 on the 0-branch
  auto inner = DeterministicTree::internal(0, leaf0, leaf1);
  auto tree = DeterministicTree::internal(1, inner, leaf1);
  CHECK(tree.depth() == 2);
  CHECK(tree.evaluate(bits_from_index(0b10, 2)) == 1);
  CHECK(tree.evaluate(bits_from_index(0b01, 2)) == 1);
  CHECK(tree.evaluate(bits_from_index(0b00, 2)) == 0);

  auto aborting = DeterministicTree::leaf(std::nullopt);
  CHECK(!aborting.evaluate(Bits(1, false)).has_value());
}

TEST_CASE("tree run spends one raw query per internal node") {
  auto tree = DeterministicTree::internal(
      1, DeterministicTree::leaf(0),
      DeterministicTree::internal(2, DeterministicTree::leaf(0), DeterministicTree::leaf(1)));
  Bits x = bits_from_index(0b110, 3);
  Rng rng(2);
  InputOracle o(x, NoiseModel::none(), rng);
  CHECK(tree.run(o) == 1);
  CHECK(o.raw_count() == 2);

  // single query on 011 at index 1
  auto single = DeterministicTree::internal(1, DeterministicTree::leaf(0),
                                            DeterministicTree::leaf(1));
  InputOracle o2(bits_from_index(0b011, 3), NoiseModel::none(), rng);
  CHECK(single.run(o2) == 1);
  CHECK(o2.raw_count() == 1);
}

TEST_CASE("leaf enumeration is left to right with paths") {
  auto tree = DeterministicTree::internal(
      0, DeterministicTree::leaf(7),
      DeterministicTree::internal(2, DeterministicTree::leaf(1), DeterministicTree::leaf(0)));
  std::vector<std::optional<std::uint64_t>> labels;
  std::vector<size_t> path_lens;
  tree.for_each_leaf([&](const std::vector<std::pair<int, std::uint8_t>>& path,
                         const std::optional<std::uint64_t>& label) {
    labels.push_back(label);
    path_lens.push_back(path.size());
    for (auto [q, bit] : path) CHECK((bit == 0 || bit == 1));
  });
  REQUIRE(labels.size() == 3);
  CHECK(labels[0] == 7);
  CHECK(labels[1] == 1);
  CHECK(labels[2] == 0);
  CHECK(path_lens == std::vector<size_t>{1, 2, 2});
}

TEST_CASE("pad_to_perfect preserves behaviour") {
  auto tree = DeterministicTree::internal(0, DeterministicTree::leaf(0),
                                          DeterministicTree::internal(1, DeterministicTree::leaf(1),
                                                                      DeterministicTree::leaf(0)));
  CHECK(!tree.is_perfect(2));
  auto padded = tree.pad_to_perfect(2);
  CHECK(padded.is_perfect(2));
  for (std::uint64_t i = 0; i < 4; ++i) {
    Bits x = bits_from_index(i, 2);
    CHECK(padded.evaluate(x) == tree.evaluate(x));
  }
  CHECK_THROWS_AS(tree.pad_to_perfect(1), std::invalid_argument);
}

TEST_CASE("randomized trees validate weights") {
  auto t = DeterministicTree::leaf(1);
  RandomizedTree r({{t, make_rat(1, 2)}, {t, make_rat(1, 2)}});
  CHECK(r.depth() == 0);
  CHECK_THROWS_AS(RandomizedTree({{t, make_rat(1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(RandomizedTree({{t, Rat(2)}, {t, Rat(-1)}}), std::invalid_argument);
}

TEST_CASE("estimate_error on an exact tree reports zero error") {
  // tree computing or[2] exactly
  auto tree = DeterministicTree::internal(
      0, DeterministicTree::internal(1, DeterministicTree::leaf(0), DeterministicTree::leaf(1)),
      DeterministicTree::leaf(1));
  QueryProcedure proc = [tree](Oracle& o) { return tree.run(o); };
  PartialFunction f = catalog("or", 2);
  Adversary adv{"or-01", bits_from_index(0b10, 2), NoiseModel::none()};
  RunReport rep = estimate_error("tree", proc, f, adv, 500, 77);
  CHECK(rep.errors == 0);
  CHECK(rep.aborts == 0);
  CHECK(rep.error_rate == 0);
  CHECK(rep.max_raw_queries == 2);
  CHECK(rep.ci_high < 0.02);
  CHECK(rep.trials == 500);
}

TEST_CASE("estimate_error rejects off-promise adversaries") {
  PartialFunction f = catalog("gapor", 4);
  QueryProcedure proc = [](Oracle&) { return 0; };
  Adversary bad{"wt-1", bits_from_index(0b0001, 4), NoiseModel::none()};
  CHECK_THROWS_AS(estimate_error("p", proc, f, bad, 10, 1), std::invalid_argument);
}

TEST_CASE("estimate_error is reproducible and counts aborts as errors") {
  PartialFunction f = catalog("or", 2);
  // abort with probability about 1/2 via a coin from the trial stream
  QueryProcedure flaky = [](Oracle& o) -> std::optional<std::uint64_t> {
    if (o.rng().bernoulli(make_rat(1, 2))) return std::nullopt;
    return 1;
  };
  Adversary adv{"ones", Bits(2, true), NoiseModel::none()};
  RunReport a = estimate_error("flaky", flaky, f, adv, 4000, 5);
  RunReport b = estimate_error("flaky", flaky, f, adv, 4000, 5);
  CHECK(a.errors == b.errors);
  CHECK(a.aborts == a.errors);  // every error here is an abort
  CHECK(a.error_rate > 0.4);
  CHECK(a.error_rate < 0.6);
  CHECK(a.ci_low < a.error_rate);
  CHECK(a.ci_high > a.error_rate);
}

TEST_CASE("single query against a hard mixture errs at the base rate") {
  // querying one coordinate of a gapmaj[3] input of weight 1 sees a 1 with
  // probability 1/3; answering that bit errs when it differs from the label 0
  PartialFunction f = catalog("gapmaj", 3);
  QueryProcedure one = [](Oracle& o) -> std::optional<std::uint64_t> { return o.query(0); };
  Adversary adv{"wt1", bits_from_index(0b001, 3), NoiseModel::none()};
  RunReport rep = estimate_error("one-query", one, f, adv, 20000, 13);
  CHECK(rep.error_rate == 1.0);  // coordinate 0 is the set bit, label is 0

  Adversary adv2{"wt1-miss", bits_from_index(0b010, 3), NoiseModel::none()};
  RunReport rep2 = estimate_error("one-query", one, f, adv2, 20000, 13);
  CHECK(rep2.error_rate == 0.0);
}

TEST_CASE("clopper-pearson brackets the truth") {
  auto [lo, hi] = binomial_confidence(0, 100, 0.99);
  CHECK(lo == 0.0);
  CHECK(hi > 0.0);
  CHECK(hi < 0.08);
  auto [lo2, hi2] = binomial_confidence(50, 100, 0.95);
  CHECK(lo2 > 0.35);
  CHECK(hi2 < 0.65);
  auto [lo3, hi3] = binomial_confidence(100, 100, 0.99);
  CHECK(lo3 > 0.9);
  CHECK(hi3 == 1.0);
}

TEST_CASE("path conjunctions collapse repeats and detect contradictions") {
  std::vector<std::pair<int, std::uint8_t>> path = {{2, 1}, {0, 0}, {2, 1}};
  auto c = path_conjunction(path);
  REQUIRE(c.has_value());
  CHECK(*c == Conjunction({2}, {0}));

  std::vector<std::pair<int, std::uint8_t>> clash = {{1, 0}, {1, 1}};
  CHECK(!path_conjunction(clash).has_value());
}
