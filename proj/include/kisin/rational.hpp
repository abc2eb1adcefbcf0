#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace kisin {

using Rational = mpq_class;
using Integer = mpz_class;

inline Integer ipow(const Integer& base, unsigned long exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Integer ipow(std::uint64_t base, unsigned long exp) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

inline Rational make_rational(const Integer& num, const Integer& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// p^{-n} as an exact rational.
inline Rational inv_pow(std::uint64_t p, unsigned long n) {
  return make_rational(Integer(1), ipow(p, n));
}

// (1 - p^{-n}) / (1 - p^{-1}) = sum_{j=0}^{n-1} p^{-j}
inline Rational geometric_ratio(std::uint64_t p, unsigned long n) {
  Rational s = 0;
  for (unsigned long j = 0; j < n; ++j) s += inv_pow(p, j);
  return s;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace kisin
