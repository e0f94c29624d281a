#include "qlab/boolfn.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace qlab {

PartialFunction::PartialFunction(std::string name, int arity, int label_bits, Eval eval)
    : name_(std::move(name)), arity_(arity), label_bits_(label_bits), eval_(std::move(eval)) {
  if (arity_ <= 0) throw std::invalid_argument("PartialFunction: arity must be positive");
  if (label_bits_ <= 0 || label_bits_ > 64)
    throw std::invalid_argument("PartialFunction: label_bits outside [1,64]");
}

std::optional<std::uint64_t> PartialFunction::evaluate(const Bits& x) const {
  if (static_cast<int>(x.size()) != arity_)
    throw std::invalid_argument("PartialFunction::evaluate: input size != arity for " + name_);
  return eval_(x);
}

namespace {

std::string sized_name(const std::string& name, int size) {
  std::ostringstream os;
  os << name << "[" << size << "]";
  return os.str();
}

PartialFunction make_or(int n) {
  return {sized_name("or", n), n, 1,
          [](const Bits& x) -> std::optional<std::uint64_t> { return weight(x) > 0 ? 1 : 0; }};
}

PartialFunction make_xor(int n) {
  return {sized_name("xor", n), n, 1,
          [](const Bits& x) -> std::optional<std::uint64_t> { return weight(x) & 1; }};
}

PartialFunction make_maj(int n) {
  if (n % 2 != 0) throw std::invalid_argument("catalog: maj arity must be even");
  // Ties (weight exactly n/2) resolve to 1.
  return {sized_name("maj", n), n, 1, [n](const Bits& x) -> std::optional<std::uint64_t> {
            return 2 * weight(x) >= n ? 1 : 0;
          }};
}

PartialFunction make_id(int n) {
  if (n > 64) throw std::invalid_argument("catalog: id arity above 64 cannot pack its label");
  return {sized_name("id", n), n, n,
          [](const Bits& x) -> std::optional<std::uint64_t> { return index_from_bits(x); }};
}

PartialFunction make_omb(int n) {
  // 1 iff the highest 1-position is odd, counting positions from 1; 0 on 0^n.
  return {sized_name("omb", n), n, 1, [](const Bits& x) -> std::optional<std::uint64_t> {
            for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i)
              if (x[i]) return (i + 1) % 2 == 1 ? 1 : 0;
            return 0;
          }};
}

PartialFunction make_which(int n) {
  if (n != 2) throw std::invalid_argument("catalog: which has arity exactly 2");
  // Defined on {10, 01}; outputs the position of the 1.
  return {sized_name("which", 2), 2, 1, [](const Bits& x) -> std::optional<std::uint64_t> {
            if (x[0] == 1 && x[1] == 0) return 0;
            if (x[0] == 0 && x[1] == 1) return 1;
            return std::nullopt;
          }};
}

PartialFunction make_gapor(int m) {
  if (m % 2 != 0) throw std::invalid_argument("catalog: gapor arity must be even");
  return {sized_name("gapor", m), m, 1, [m](const Bits& x) -> std::optional<std::uint64_t> {
            int w = weight(x);
            if (w == 0) return 0;
            if (w == m / 2) return 1;
            return std::nullopt;
          }};
}

PartialFunction make_not_gapor(int m) {
  if (m % 2 != 0) throw std::invalid_argument("catalog: not-gapor arity must be even");
  return {sized_name("not-gapor", m), m, 1, [m](const Bits& x) -> std::optional<std::uint64_t> {
            int w = weight(x);
            if (w == 0) return 1;
            if (w == m / 2) return 0;
            return std::nullopt;
          }};
}

PartialFunction make_gapmaj(int m) {
  if (m % 3 != 0) throw std::invalid_argument("catalog: gapmaj arity must be divisible by 3");
  return {sized_name("gapmaj", m), m, 1, [m](const Bits& x) -> std::optional<std::uint64_t> {
            int w = weight(x);
            if (w == m / 3) return 0;
            if (w == 2 * m / 3) return 1;
            return std::nullopt;
          }};
}

}  // namespace

PartialFunction catalog(const std::string& name, int size) {
  if (size <= 0) throw std::invalid_argument("catalog: size must be positive");
  if (name == "or") return make_or(size);
  if (name == "xor") return make_xor(size);
  if (name == "maj") return make_maj(size);
  if (name == "id") return make_id(size);
  if (name == "omb") return make_omb(size);
  if (name == "which") return make_which(size);
  if (name == "gapor") return make_gapor(size);
  if (name == "gapmaj") return make_gapmaj(size);
  if (name == "not-gapor") return make_not_gapor(size);
  throw std::invalid_argument("catalog: unknown function '" + name + "'");
}

ComposedFunction::ComposedFunction(PartialFunction outer, PartialFunction inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
  if (inner_.label_bits() != 1)
    throw std::invalid_argument("compose: inner function must output single bits");
  if (static_cast<long long>(outer_.arity()) * inner_.arity() > (1 << 30))
    throw std::invalid_argument("compose: composed arity too large");
}

std::optional<std::uint64_t> ComposedFunction::evaluate(const Bits& x) const {
  if (static_cast<int>(x.size()) != arity())
    throw std::invalid_argument("ComposedFunction::evaluate: input size != arity");
  const int n = blocks();
  const int m = inner_.arity();
  Bits y(n);
  for (int i = 0; i < n; ++i) {
    auto v = inner_.evaluate(block_of(x, i, m));
    if (!v) return std::nullopt;  // any undefined block makes the whole value undefined
    y[i] = static_cast<std::uint8_t>(*v);
  }
  return outer_.evaluate(y);
}

PartialFunction ComposedFunction::as_partial() const {
  ComposedFunction self = *this;
  return {outer_.name() + " o " + inner_.name(), arity(), outer_.label_bits(),
          [self](const Bits& x) { return self.evaluate(x); }};
}

ComposedFunction compose(const PartialFunction& outer, const PartialFunction& inner) {
  return {outer, inner};
}

namespace {

PartialFunction parse_term(const std::string& tok) {
  auto lb = tok.find('[');
  if (lb == std::string::npos) {
    if (tok == "which") return catalog("which", 2);
    throw std::invalid_argument("parse_function: missing size in '" + tok + "'");
  }
  if (tok.back() != ']')
    throw std::invalid_argument("parse_function: malformed term '" + tok + "'");
  const std::string name = tok.substr(0, lb);
  const std::string num = tok.substr(lb + 1, tok.size() - lb - 2);
  if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("parse_function: malformed size in '" + tok + "'");
  long size = std::stol(num);
  if (size <= 0 || size > (1 << 30))
    throw std::invalid_argument("parse_function: size out of range in '" + tok + "'");
  return catalog(name, static_cast<int>(size));
}

}  // namespace

PartialFunction parse_function(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  if (toks.empty()) throw std::invalid_argument("parse_function: empty spec");
  if (toks.size() % 2 == 0) throw std::invalid_argument("parse_function: dangling separator");
  for (std::size_t i = 1; i < toks.size(); i += 2)
    if (toks[i] != "o")
      throw std::invalid_argument("parse_function: expected 'o', found '" + toks[i] + "'");

  PartialFunction cur = parse_term(toks.back());
  for (std::size_t i = toks.size() - 1; i >= 2; i -= 2)
    cur = compose(parse_term(toks[i - 2]), cur).as_partial();
  return cur;
}

std::vector<Bits> promise_inputs(const PartialFunction& f) {
  if (f.arity() > 24)
    throw std::invalid_argument("promise_inputs: arity too large to enumerate");
  std::vector<Bits> out;
  const std::uint64_t total = std::uint64_t{1} << f.arity();
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    Bits x = bits_from_index(idx, f.arity());
    if (f.defined_on(x)) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace qlab
