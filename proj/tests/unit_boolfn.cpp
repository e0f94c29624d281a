#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <stdexcept>

#include "qlab/boolfn.hpp"

using namespace qlab;

namespace {

std::optional<std::uint64_t> eval(const PartialFunction& f, std::uint64_t idx) {
  return f.evaluate(bits_from_index(idx, f.arity()));
}

}  // namespace

TEST_CASE("or, xor, majority") {
  PartialFunction f = catalog("or", 3);
  CHECK(eval(f, 0b000) == 0);
  CHECK(eval(f, 0b010) == 1);
  CHECK(eval(f, 0b111) == 1);

  PartialFunction x = catalog("xor", 4);
  CHECK(eval(x, 0b0000) == 0);
  CHECK(eval(x, 0b0110) == 0);
  CHECK(eval(x, 0b0111) == 1);

  PartialFunction m = catalog("maj", 4);
  CHECK(eval(m, 0b0001) == 0);
  CHECK(eval(m, 0b0011) == 1);  // tie resolves to 1
  CHECK(eval(m, 0b0111) == 1);
  CHECK_THROWS_AS(catalog("maj", 3), std::invalid_argument);
}

TEST_CASE("identity packs its input as the label") {
  PartialFunction f = catalog("id", 3);
  CHECK(f.label_bits() == 3);
  CHECK(eval(f, 0b101) == 0b101);
  CHECK(eval(f, 0) == 0);
}

TEST_CASE("odd-max-bit checks the highest set position") {
  PartialFunction f = catalog("omb", 4);
  CHECK(eval(f, 0b0000) == 0);
  CHECK(eval(f, 0b0001) == 1);  // highest 1 at position 1
  CHECK(eval(f, 0b0010) == 0);
  CHECK(eval(f, 0b0101) == 1);  // highest 1 at position 3
  CHECK(eval(f, 0b1101) == 0);  // highest 1 at position 4
}

TEST_CASE("which names the set position on its promise") {
  PartialFunction f = catalog("which", 2);
  CHECK(eval(f, 0b01) == 0);  // string "10": first position set
  CHECK(eval(f, 0b10) == 1);
  CHECK(!eval(f, 0b00).has_value());
  CHECK(!eval(f, 0b11).has_value());
  CHECK_THROWS_AS(catalog("which", 3), std::invalid_argument);
}

TEST_CASE("gap promises") {
  PartialFunction g = catalog("gapor", 4);
  CHECK(eval(g, 0b0000) == 0);
  CHECK(eval(g, 0b0101) == 1);
  CHECK(!eval(g, 0b0001).has_value());
  CHECK(!eval(g, 0b0111).has_value());
  CHECK_THROWS_AS(catalog("gapor", 5), std::invalid_argument);

  PartialFunction ng = catalog("not-gapor", 4);
  CHECK(eval(ng, 0b0000) == 1);
  CHECK(eval(ng, 0b0011) == 0);
  CHECK(!eval(ng, 0b1110).has_value());

  PartialFunction gm = catalog("gapmaj", 6);
  CHECK(eval(gm, 0b000011) == 0);
  CHECK(eval(gm, 0b011011) == 1);
  CHECK(!eval(gm, 0b000001).has_value());
  CHECK(!eval(gm, 0b111111).has_value());
  CHECK_THROWS_AS(catalog("gapmaj", 4), std::invalid_argument);
}

TEST_CASE("catalog rejects unknown names and bad sizes") {
  CHECK_THROWS_AS(catalog("nand", 2), std::invalid_argument);
  CHECK_THROWS_AS(catalog("or", 0), std::invalid_argument);
  CHECK_THROWS_AS(catalog("id", 65), std::invalid_argument);
}

TEST_CASE("composition applies the inner per block and propagates undefined") {
  ComposedFunction f = compose(catalog("or", 2), catalog("gapmaj", 3));
  CHECK(f.arity() == 6);
  CHECK(f.blocks() == 2);

  // both blocks weight 1: inner values 0,0
  CHECK(f.evaluate(bits_from_index(0b001010, 6)) == 0);
  // block 0 weight 2, block 1 weight 1
  CHECK(f.evaluate(bits_from_index(0b001011, 6)) == 1);
  // block 1 weight 3 is off the inner promise
  CHECK(!f.evaluate(bits_from_index(0b111001, 6)).has_value());

  PartialFunction p = f.as_partial();
  CHECK(p.arity() == 6);
  CHECK(p.evaluate(bits_from_index(0b001010, 6)) == 0);
  CHECK(p.name() == "or[2] o gapmaj[3]");

  CHECK_THROWS_AS(compose(catalog("or", 2), catalog("id", 2)), std::invalid_argument);
}

TEST_CASE("function text parses with right-nested chains") {
  PartialFunction f = parse_function("xor[2] o gapor[4]");
  CHECK(f.arity() == 8);
  CHECK(f.evaluate(bits_from_index(0b00110000, 8)) == 1);

  PartialFunction deep = parse_function("or[2] o which[2] o gapor[2]");
  CHECK(deep.arity() == 8);

  PartialFunction plain = parse_function("maj[6]");
  CHECK(plain.arity() == 6);

  CHECK_THROWS_AS(parse_function("or[2] o"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function("or"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function("mystery[3]"), std::invalid_argument);
}

TEST_CASE("promise input enumeration") {
  auto ins = promise_inputs(catalog("gapor", 4));
  // weight 0 and weight 2: 1 + 6
  CHECK(ins.size() == 7);
  for (const auto& x : ins) CHECK(catalog("gapor", 4).defined_on(x));

  auto total = promise_inputs(catalog("xor", 3));
  CHECK(total.size() == 8);

  CHECK_THROWS_AS(promise_inputs(catalog("or", 30)), std::invalid_argument);
}
