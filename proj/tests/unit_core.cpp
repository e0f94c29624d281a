#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qlab/bits.hpp"
#include "qlab/lp.hpp"
#include "qlab/rational.hpp"
#include "qlab/rng.hpp"
#include "support.hpp"

using namespace qlab;

TEST_CASE("rational helpers") {
  CHECK(make_rat(2, 4) == make_rat(1, 2));
  CHECK(make_rat(-3, 6) == make_rat(1, -2));
  CHECK_THROWS_AS(make_rat(1, 0), std::invalid_argument);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(0, 0) == 1);
  CHECK(rat_pow(make_rat(2, 3), 3) == make_rat(8, 27));
  CHECK(rat_pow(make_rat(5, 7), 0) == 1);
  CHECK(rat_str(make_rat(6, 4)) == "3/2");
  CHECK(rat_str(Rat(3)) == "3/1");
  CHECK(parse_rat("3") == Rat(3));
  CHECK(to_double(make_rat(1, 2)) == doctest::Approx(0.5));
}

TEST_CASE("bit vector helpers") {
  Bits x = bits_from_index(0b1011, 4);
  REQUIRE(x.size() == 4);
  CHECK(x[0]);
  CHECK(x[1]);
  CHECK(!x[2]);
  CHECK(x[3]);
  CHECK(weight(x) == 3);
  CHECK(weight(Bits(7, false)) == 0);

  Bits whole = bits_from_index(0b110100, 6);
  Bits b0 = block_of(whole, 0, 3);
  Bits b1 = block_of(whole, 1, 3);
  CHECK(weight(b0) == 1);
  CHECK(b0[2]);
  CHECK(weight(b1) == 2);
}

TEST_CASE("rng determinism and stream independence") {
  Rng a(123), b(123), c(124);
  bool diverged = false;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t va = a.next();
    CHECK(va == b.next());
    if (va != c.next()) diverged = true;
  }
  CHECK(diverged);

  Rng t0 = Rng::for_trial(9, 0);
  Rng t0_again = Rng::for_trial(9, 0);
  Rng t1 = Rng::for_trial(9, 1);
  std::uint64_t v = t0.next();
  CHECK(v == t0_again.next());
  CHECK(v != t1.next());
}

TEST_CASE("uniform_below is roughly uniform") {
  Rng rng(42);
  const int n = 10;
  const int draws = 100000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) ++counts[static_cast<size_t>(rng.uniform_below(n))];
  double expect = static_cast<double>(draws) / n;
  double chi2 = 0;
  for (int k : counts) chi2 += (k - expect) * (k - expect) / expect;
  // 9 degrees of freedom; the 99.9% quantile is about 27.9
  CHECK(chi2 < 35.0);
  CHECK_THROWS_AS(rng.uniform_below(0), std::invalid_argument);
}

TEST_CASE("bernoulli edge cases") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    CHECK(!rng.bernoulli(Rat(0)));
    CHECK(rng.bernoulli(Rat(1)));
  }
  CHECK_THROWS_AS(rng.bernoulli(make_rat(3, 2)), std::invalid_argument);
  CHECK_THROWS_AS(rng.bernoulli(make_rat(-1, 2)), std::invalid_argument);
  int ones = 0;
  for (int i = 0; i < 30000; ++i)
    if (rng.bernoulli(make_rat(1, 3))) ++ones;
  CHECK(ones > 9000);
  CHECK(ones < 11000);
}

TEST_CASE("simplex solves worked maximization") {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18: optimum 36 at (2, 6)
  std::vector<std::vector<Rat>> A = {{Rat(1), Rat(0)}, {Rat(0), Rat(2)}, {Rat(3), Rat(2)}};
  std::vector<Rat> b = {Rat(4), Rat(12), Rat(18)};
  std::vector<Rat> c = {Rat(3), Rat(5)};
  auto res = solve_lp_max(A, b, c);
  REQUIRE(res.status == LpResult::Status::Optimal);
  CHECK(res.objective == 36);
  CHECK(res.x[0] == 2);
  CHECK(res.x[1] == 6);
}

TEST_CASE("simplex reports infeasible and unbounded") {
  std::vector<std::vector<Rat>> A = {{Rat(1)}, {Rat(-1)}};
  std::vector<Rat> b = {Rat(1), Rat(-2)};  // x <= 1 and x >= 2
  std::vector<Rat> c = {Rat(1)};
  CHECK(solve_lp_max(A, b, c).status == LpResult::Status::Infeasible);

  std::vector<std::vector<Rat>> A2 = {{Rat(-1)}};
  std::vector<Rat> b2 = {Rat(0)};
  CHECK(solve_lp_max(A2, b2, c).status == LpResult::Status::Unbounded);
}

TEST_CASE("matrix games solve exactly") {
  // matching pennies
  std::vector<std::vector<Rat>> pennies = {{Rat(1), Rat(-1)}, {Rat(-1), Rat(1)}};
  auto g = solve_matrix_game(pennies);
  CHECK(g.value == 0);
  CHECK(g.row_mix[0] == make_rat(1, 2));
  CHECK(g.col_mix[1] == make_rat(1, 2));

  std::vector<std::vector<Rat>> skewed = {{Rat(2), Rat(1)}, {Rat(0), Rat(3)}};
  auto h = solve_matrix_game(skewed);
  CHECK(h.value == make_rat(3, 2));

  // dominant row: pure optimum
  std::vector<std::vector<Rat>> dom = {{Rat(5), Rat(4)}, {Rat(1), Rat(0)}};
  CHECK(solve_matrix_game(dom).value == 4);
}

TEST_CASE("simplex feasibility agrees with elimination oracle") {
  Rng rng(2026);
  for (int iter = 0; iter < 60; ++iter) {
    size_t vars = 1 + rng.uniform_below(3);
    size_t rows = 1 + rng.uniform_below(4);
    std::vector<std::vector<Rat>> A(rows, std::vector<Rat>(vars));
    std::vector<Rat> b(rows);
    for (size_t r = 0; r < rows; ++r) {
      for (size_t j = 0; j < vars; ++j)
        A[r][j] = Rat(static_cast<long>(rng.uniform_below(7)) - 3);
      b[r] = Rat(static_cast<long>(rng.uniform_below(9)) - 4);
    }
    std::vector<Rat> zero(vars, Rat(0));
    bool lp = solve_lp_max(A, b, zero).status == LpResult::Status::Optimal;
    CHECK(lp == test::fm_feasible(A, b));
  }
}
