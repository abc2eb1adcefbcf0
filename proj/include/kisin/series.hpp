#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/field.hpp"

namespace kisin {

// u-adic valuation: a nonnegative integer, or infinity for the zero series.
class Valuation {
 public:
  Valuation() = default;  // infinity
  explicit Valuation(std::int64_t v) : v_(v) {
    if (v < 0) throw InvalidInput("Valuation: negative value");
  }
  static Valuation infinity() { return Valuation(); }

  bool is_infinite() const { return !v_.has_value(); }
  bool is_finite() const { return v_.has_value(); }
  std::int64_t value() const {
    if (!v_) throw InvalidInput("Valuation: value() of infinity");
    return *v_;
  }

  friend Valuation operator+(Valuation a, Valuation b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return Valuation(*a.v_ + *b.v_);
  }
  friend bool operator==(const Valuation& a, const Valuation& b) = default;
  friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.is_infinite() || b.is_infinite()) {
      if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
      return a.is_infinite() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return *a.v_ <=> *b.v_;
  }

  std::string str() const { return v_ ? std::to_string(*v_) : "inf"; }

 private:
  std::optional<std::int64_t> v_;
};

// A power series over F_q known modulo u^precision. Coefficients beyond the
// stored vector (but below precision) are zero; the vector never has trailing zeros.
class TruncSeries {
 public:
  TruncSeries(FieldSpec field, std::int64_t precision) : field_(std::move(field)), prec_(precision) {
    if (precision < 1) throw InvalidInput("TruncSeries: precision must be >= 1");
  }

  static TruncSeries monomial(const FieldSpec& F, Elem c, std::int64_t deg, std::int64_t precision) {
    TruncSeries s(F, precision);
    if (deg < precision && c.v != 0) {
      s.c_.assign(deg + 1, F.zero());
      s.c_[deg] = c;
    }
    return s;
  }

  // Integer coefficients, least degree first; reduced mod p (prime-field embedding).
  static TruncSeries from_ints(const FieldSpec& F, const std::vector<std::int64_t>& ints,
                               std::int64_t precision) {
    TruncSeries s(F, precision);
    const std::size_t n = std::min<std::size_t>(ints.size(), precision);
    s.c_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.c_.push_back(F.from_int(ints[i]));
    s.trim();
    return s;
  }

  static TruncSeries from_elems(const FieldSpec& F, std::vector<Elem> cs, std::int64_t precision) {
    TruncSeries s(F, precision);
    if (std::int64_t(cs.size()) > precision) cs.resize(precision);
    s.c_ = std::move(cs);
    s.trim();
    return s;
  }

  // Sparse terms (degree, coefficient); terms at or beyond precision are dropped.
  static TruncSeries from_terms(const FieldSpec& F, const std::vector<std::pair<std::int64_t, Elem>>& terms,
                                std::int64_t precision) {
    TruncSeries s(F, precision);
    for (auto [d, c] : terms) {
      if (d >= precision) continue;
      if (std::int64_t(s.c_.size()) <= d) s.c_.resize(d + 1, F.zero());
      s.c_[d] = F.add(s.c_[d], c);
    }
    s.trim();
    return s;
  }

  const FieldSpec& field() const { return field_; }
  std::int64_t precision() const { return prec_; }
  bool is_zero() const { return c_.empty(); }
  // One past the highest stored nonzero degree.
  std::int64_t support_end() const { return static_cast<std::int64_t>(c_.size()); }
  const std::vector<Elem>& coeffs() const { return c_; }

  Elem coeff(std::int64_t i) const {
    if (i < 0) return field_.zero();
    if (i >= prec_)
      throw PrecisionExhausted("coefficient of u^" + std::to_string(i) + " requested at precision " +
                               std::to_string(prec_));
    return i < support_end() ? c_[i] : field_.zero();
  }

  std::vector<std::pair<std::int64_t, Elem>> terms() const {
    std::vector<std::pair<std::int64_t, Elem>> t;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i].v != 0) t.emplace_back(static_cast<std::int64_t>(i), c_[i]);
    return t;
  }

  TruncSeries with_precision(std::int64_t n) const {
    TruncSeries s(field_, n);
    s.c_.assign(c_.begin(), c_.begin() + std::min<std::int64_t>(n, support_end()));
    s.trim();
    return s;
  }

  friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) { return a.combine(b, +1); }
  friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) { return a.combine(b, -1); }
  TruncSeries operator-() const { return TruncSeries(field_, prec_) - *this; }

  friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    check_same(a, b);
    const FieldSpec& F = a.field_;
    const std::int64_t n = std::min(a.prec_, b.prec_);
    TruncSeries r(F, n);
    if (a.is_zero() || b.is_zero()) return r;
    const std::int64_t len = std::min<std::int64_t>(n, a.support_end() + b.support_end() - 1);
    const auto ta = a.terms();
    const auto tb = b.terms();
    if (F.f() == 1) {
      const std::uint64_t p = F.p();
      std::vector<std::uint64_t> acc(len, 0);
      for (auto [da, ca] : ta) {
        if (da >= len) break;
        for (auto [db, cb] : tb) {
          const std::int64_t d = da + db;
          if (d >= len) break;
          acc[d] = (acc[d] + std::uint64_t(ca.v) * cb.v) % p;
        }
      }
      r.c_.resize(len);
      for (std::int64_t i = 0; i < len; ++i) r.c_[i] = {static_cast<std::uint32_t>(acc[i])};
    } else {
      r.c_.assign(len, F.zero());
      for (auto [da, ca] : ta) {
        if (da >= len) break;
        for (auto [db, cb] : tb) {
          const std::int64_t d = da + db;
          if (d >= len) break;
          r.c_[d] = F.add(r.c_[d], F.mul(ca, cb));
        }
      }
    }
    r.trim();
    return r;
  }

  TruncSeries scaled(Elem c) const {
    TruncSeries r(field_, prec_);
    if (c.v == 0) return r;
    r.c_.reserve(c_.size());
    for (Elem x : c_) r.c_.push_back(field_.mul(c, x));
    r.trim();
    return r;
  }

  // Multiplication by u^k (k >= 0); precision grows by k since low terms are known zeros.
  TruncSeries shifted_up(std::int64_t k) const {
    TruncSeries r(field_, prec_ + k);
    if (!is_zero()) {
      r.c_.assign(k, field_.zero());
      r.c_.insert(r.c_.end(), c_.begin(), c_.end());
    }
    return r;
  }

  // Exact division by u^k; requires valuation >= k. Precision drops by k.
  TruncSeries shifted_down(std::int64_t k) const {
    if (k >= prec_) throw PrecisionExhausted("shifted_down: shift exceeds precision");
    TruncSeries r(field_, prec_ - k);
    for (std::int64_t i = 0; i < std::min<std::int64_t>(k, support_end()); ++i)
      if (c_[i].v != 0) throw InvalidInput("shifted_down: series not divisible by u^k");
    if (support_end() > k) r.c_.assign(c_.begin() + k, c_.end());
    return r;
  }

  // Inverse of a unit series (constant term nonzero), to the same precision.
  TruncSeries unit_inverse() const {
    const FieldSpec& F = field_;
    if (coeff(0).v == 0) throw InvalidInput("unit_inverse: constant term is zero");
    const Elem inv0 = F.inv(c_[0]);
    const auto ta = terms();
    std::vector<Elem> b(prec_, F.zero());
    b[0] = inv0;
    for (std::int64_t n = 1; n < prec_; ++n) {
      Elem s = F.zero();
      for (auto [d, c] : ta) {
        if (d == 0) continue;
        if (d > n) break;
        if (b[n - d].v != 0) s = F.add(s, F.mul(c, b[n - d]));
      }
      b[n] = F.neg(F.mul(inv0, s));
    }
    return from_elems(F, std::move(b), prec_);
  }

  friend bool operator==(const TruncSeries& a, const TruncSeries& b) {
    return a.field_ == b.field_ && a.prec_ == b.prec_ && a.c_ == b.c_;
  }

  // Equality of the common known part.
  bool agrees_with(const TruncSeries& o) const {
    const std::int64_t n = std::min(prec_, o.prec_);
    for (std::int64_t i = 0; i < n; ++i)
      if (coeff(i) != o.coeff(i)) return false;
    return true;
  }

 private:
  static void check_same(const TruncSeries& a, const TruncSeries& b) {
    if (!(a.field_ == b.field_)) throw InvalidInput("TruncSeries: field mismatch");
  }

  TruncSeries combine(const TruncSeries& b, int sign) const {
    check_same(*this, b);
    const std::int64_t n = std::min(prec_, b.prec_);
    TruncSeries r(field_, n);
    const std::int64_t len = std::min<std::int64_t>(n, std::max(support_end(), b.support_end()));
    r.c_.resize(len);
    for (std::int64_t i = 0; i < len; ++i) {
      const Elem x = i < support_end() ? c_[i] : field_.zero();
      const Elem y = i < b.support_end() ? b.c_[i] : field_.zero();
      r.c_[i] = sign > 0 ? field_.add(x, y) : field_.sub(x, y);
    }
    r.trim();
    return r;
  }

  void trim() {
    while (!c_.empty() && c_.back().v == 0) c_.pop_back();
  }

  FieldSpec field_;
  std::int64_t prec_;
  std::vector<Elem> c_;
};

inline Valuation valuation(const TruncSeries& s) {
  const auto& c = s.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].v != 0) return Valuation(static_cast<std::int64_t>(i));
  return Valuation::infinity();
}

// Highest degree with a nonzero coefficient; -1 for zero.
inline std::int64_t degree(const TruncSeries& s) { return s.support_end() - 1; }

// sigma: c u^i -> c^p u^{pi}, iterated; precision is kept and higher degrees dropped.
inline TruncSeries frobenius_sigma(const TruncSeries& s, int times = 1) {
  if (times < 0) throw InvalidInput("frobenius_sigma: times must be >= 0");
  const FieldSpec& F = s.field();
  std::vector<std::pair<std::int64_t, Elem>> t = s.terms();
  for (int k = 0; k < times; ++k) {
    std::vector<std::pair<std::int64_t, Elem>> next;
    for (auto [d, c] : t) {
      if (d != 0 && d * static_cast<std::int64_t>(F.p()) >= s.precision()) break;
      next.emplace_back(d * static_cast<std::int64_t>(F.p()), F.frob(c));
    }
    t = std::move(next);
  }
  return TruncSeries::from_terms(F, t, s.precision());
}

// Default working precision: twice the largest entry degree, plus one.
inline std::int64_t default_precision(std::int64_t max_entry_degree) { return 2 * max_entry_degree + 1; }

}  // namespace kisin
