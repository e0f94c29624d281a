#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qlab/bits.hpp"

namespace qlab {

// Possibly-partial function on {0,1}^arity. Labels are packed into uint64:
// single-bit outputs use 0/1, vector outputs (identity) pack coordinate i
// into bit i. Evaluation returns nullopt off the promise.
class PartialFunction {
 public:
  using Eval = std::function<std::optional<std::uint64_t>(const Bits&)>;

  PartialFunction() = default;
  PartialFunction(std::string name, int arity, int label_bits, Eval eval);

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  int label_bits() const { return label_bits_; }

  std::optional<std::uint64_t> evaluate(const Bits& x) const;
  bool defined_on(const Bits& x) const { return evaluate(x).has_value(); }

 private:
  std::string name_;
  int arity_ = 0;
  int label_bits_ = 1;
  Eval eval_;
};

// Named single functions. Size preconditions: maj and gapor even, gapmaj
// divisible by 3, which exactly 2.
PartialFunction catalog(const std::string& name, int size);

// f applied to n = f.arity() disjoint blocks of g; undefined propagates.
class ComposedFunction {
 public:
  ComposedFunction(PartialFunction outer, PartialFunction inner);

  const PartialFunction& outer() const { return outer_; }
  const PartialFunction& inner() const { return inner_; }
  int blocks() const { return outer_.arity(); }
  int arity() const { return outer_.arity() * inner_.arity(); }

  std::optional<std::uint64_t> evaluate(const Bits& x) const;

  // Wrap back into a PartialFunction so compositions nest.
  PartialFunction as_partial() const;

 private:
  PartialFunction outer_;
  PartialFunction inner_;
};

ComposedFunction compose(const PartialFunction& outer, const PartialFunction& inner);

// Text form: "xor[8] o gapmaj[9]", outer first; "o" chains nest to the right.
PartialFunction parse_function(const std::string& text);

// All defined inputs, in index order. Guarded to arity <= 24.
std::vector<Bits> promise_inputs(const PartialFunction& f);

}  // namespace qlab
