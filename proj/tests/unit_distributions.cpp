#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "qlab/distributions.hpp"
#include "qlab/rng.hpp"
#include "support.hpp"

using namespace qlab;

TEST_CASE("conjunction construction and evaluation") {
  Conjunction c({0, 2}, {5});
  CHECK(c.pos == std::vector<int>{0, 2});
  CHECK(c.width() == 3);
  Bits x(6, false);
  x[0] = x[2] = true;
  CHECK(c.evaluate(x));
  x[5] = true;
  CHECK(!c.evaluate(x));

  Conjunction t;
  CHECK(t.width() == 0);
  CHECK(t.evaluate(Bits(3, false)));

  CHECK_THROWS_AS(Conjunction({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(Conjunction({0, 0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Conjunction({2, 0}, {}), std::invalid_argument);  // must arrive sorted
}

TEST_CASE("conjunction text round trip") {
  Conjunction c({2}, {0, 6});
  CHECK(c.to_string() == "-1,+3,-7");  // merged, ordered by variable index
  CHECK(Conjunction::parse("+3,-1,-7") == c);
  CHECK(Conjunction::parse("-7,+3,-1") == c);
  CHECK(Conjunction().to_string() == "true");
  CHECK(Conjunction::parse("true") == Conjunction());
  CHECK_THROWS_AS(Conjunction::parse("+0"), std::invalid_argument);
  CHECK_THROWS_AS(Conjunction::parse("banana"), std::invalid_argument);
}

TEST_CASE("conjunction enumeration counts and order") {
  // arity 3: 1 empty + 6 singletons = 7 up to width 1
  CHECK(count_conjunctions(3, 1) == 7);
  // arity 4, width <= 2: 1 + 8 + C(4,2)*4 = 33
  CHECK(count_conjunctions(4, 2) == 33);

  auto all = enumerate_conjunctions(4, 2);
  CHECK(all.size() == 33);
  CHECK(all.front() == Conjunction());
  std::set<std::string> seen;
  int prev_width = 0;
  for (const auto& c : all) {
    CHECK(c.width() >= prev_width);
    prev_width = c.width();
    CHECK(seen.insert(c.to_string()).second);
  }

  int streamed = 0;
  for_each_conjunction(4, 2, [&](const Conjunction& c) {
    CHECK(c == all[static_cast<size_t>(streamed)]);
    ++streamed;
  });
  CHECK(streamed == 33);
}

TEST_CASE("slice probabilities match direct counting") {
  CHECK(conj_prob_slice(1, 0, 3, 1) == make_rat(1, 3));
  CHECK(conj_prob_slice(0, 1, 3, 1) == make_rat(2, 3));
  CHECK(conj_prob_slice(2, 0, 3, 1) == 0);
  CHECK(conj_prob_slice(0, 0, 5, 2) == 1);

  SliceDistribution g(3, 1);
  CHECK(conj_prob(g, Conjunction({}, {0})) == make_rat(2, 3));
  CHECK(conj_prob(g, Conjunction({0}, {})) == make_rat(1, 3));

  Rng rng(17);
  for (int m = 1; m <= 6; ++m)
    for (int k = 0; k <= m; ++k)
      for (int rep = 0; rep < 8; ++rep) {
        Conjunction c = random_conjunction(rng, m, std::min(m, 3));
        CHECK(conj_prob(SliceDistribution(m, k), c) == test::slice_mass_by_counting(c, m, k));
      }
}

TEST_CASE("block products multiply per-block masses") {
  BlockProduct d{{SliceDistribution(3, 1), SliceDistribution(3, 2)}};
  CHECK(d.arity() == 6);
  // -x_1 in block 0 and +x_4 in block 1
  Conjunction c({3}, {0});
  CHECK(conj_prob(d, c) == make_rat(2, 3) * make_rat(2, 3));
  CHECK(conj_prob(d, Conjunction()) == 1);
}

TEST_CASE("outer mixtures agree with brute enumeration") {
  SliceDistribution g0(3, 1), g1(3, 2);

  // worked value: parity-0 mixture over two blocks, conjunction -x1 & -x4
  OuterMixture par = OuterMixture::parity(2, g0, g1, 0);
  Conjunction c({}, {0, 3});
  Rat closed = conj_prob(par, c);
  CHECK(closed == conj_prob_outer_sum(par, c));
  CHECK(closed == test::mixture_mass_by_counting(par, c));

  Rng rng(99);
  std::vector<OuterMixture> ds = {
      OuterMixture::weight_slice(2, g0, g1, 1),
      OuterMixture::weight_slice(3, SliceDistribution(2, 1), SliceDistribution(2, 2), 2),
      OuterMixture::parity(2, g0, g1, 1),
      OuterMixture::full(2, g0, g1),
      OuterMixture::full(3, SliceDistribution(2, 0), SliceDistribution(2, 1)),
  };
  for (const auto& d : ds)
    for (int rep = 0; rep < 10; ++rep) {
      Conjunction c2 = random_conjunction(rng, d.arity(), 4);
      Rat v = conj_prob(d, c2);
      CHECK(v == conj_prob_outer_sum(d, c2));
      CHECK(v == test::mixture_mass_by_counting(d, c2));
    }
}

TEST_CASE("finite distributions validate and mix") {
  Bits a(4, false), b(4, false);
  b[1] = true;
  FiniteDist d(4, {{a, make_rat(1, 4)}, {b, make_rat(3, 4)}});
  CHECK(conj_prob(d, Conjunction({1}, {})) == make_rat(3, 4));
  CHECK(conj_prob(d, Conjunction({}, {0})) == 1);

  CHECK_THROWS_AS(FiniteDist(4, {{a, make_rat(1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteDist(4, {{a, Rat(0)}, {b, Rat(1)}}), std::invalid_argument);

  FiniteDist s = FiniteDist::from_slice(SliceDistribution(4, 2));
  CHECK(s.atoms.size() == 6);
  CHECK(conj_prob(s, Conjunction({0}, {})) == make_rat(1, 2));

  FiniteDist m = FiniteDist::mix(make_rat(1, 3), d, make_rat(2, 3), s);
  Rat expect = make_rat(1, 3) * make_rat(3, 4) + make_rat(2, 3) * make_rat(1, 2);
  CHECK(conj_prob(m, Conjunction({1}, {})) == expect);
}

TEST_CASE("split_blocks rebases indices") {
  Conjunction c({0, 4}, {5});
  auto parts = split_blocks(c, 2, 3);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == Conjunction({0}, {}));
  CHECK(parts[1] == Conjunction({1}, {2}));
  CHECK(split_blocks(Conjunction(), 3, 2).size() == 3);
}

TEST_CASE("elementary symmetric polynomials") {
  std::vector<Rat> vals = {Rat(1), Rat(2), Rat(3)};
  auto e = elementary_symmetric(vals, 3);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == 1);
  CHECK(e[1] == 6);
  CHECK(e[2] == 11);
  CHECK(e[3] == 6);
  auto trunc = elementary_symmetric(vals, 1);
  REQUIRE(trunc.size() == 2);
  CHECK(trunc[1] == 6);
  CHECK(elementary_symmetric({}, 0) == std::vector<Rat>{Rat(1)});
}
