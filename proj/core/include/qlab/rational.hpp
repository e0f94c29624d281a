#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qlab {

// Exact arithmetic used everywhere outside Monte Carlo estimation.
using Int = mpz_class;
using Rat = mpq_class;

// p/q in canonical form; q must be nonzero.
inline Rat make_rat(long p, long q) {
  if (q == 0) throw std::invalid_argument("make_rat: zero denominator");
  Rat r(p, q);
  r.canonicalize();
  return r;
}

inline Rat make_rat(const Int& p, const Int& q) {
  if (q == 0) throw std::invalid_argument("make_rat: zero denominator");
  Rat r(p, q);
  r.canonicalize();
  return r;
}

// C(n, k); zero when k > n.
inline Int binomial(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat r(1);
  Rat b = base;
  unsigned long k = e;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

// Serialized as "p/q" with q >= 1, lowest terms ("2/1" for integers).
inline std::string rat_str(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Accepts "p", "p/q", optional leading minus on p.
inline Rat parse_rat(const std::string& text) {
  Rat r;
  if (text.empty() || r.set_str(text, 10) != 0)
    throw std::invalid_argument("parse_rat: malformed rational '" + text + "'");
  if (r.get_den() == 0)
    throw std::invalid_argument("parse_rat: zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

}  // namespace qlab
