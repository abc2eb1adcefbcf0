#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kisin/errors.hpp"

namespace kisin {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

// An element of F_{p^f}, encoded as sum_i d_i p^i with digits d_i in [0, p)
// being the coefficients of the polynomial representative of degree < f.
struct Elem {
  std::uint32_t v = 0;
  friend bool operator==(Elem, Elem) = default;
  friend auto operator<=>(Elem, Elem) = default;
};

namespace detail {

using Poly = std::vector<std::uint64_t>;  // coefficients mod p, low degree first

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  std::uint64_t r = 1, e = p - 2;
  a %= p;
  while (e) {
    if (e & 1) r = r * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return r;
}

inline Poly poly_mod(Poly a, const Poly& m, std::uint64_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint64_t lead_inv = inv_mod(m.back(), p);
  while (a.size() > dm) {
    const std::uint64_t c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = (a[shift + i] + (p - c) * m[i]) % p;
    trim(a);
  }
  return a;
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod(std::move(r), m, p);
}

inline Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
  Poly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

inline Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Irreducible iff gcd(x^{p^i} - x, m) = 1 for 1 <= i <= deg/2.
inline bool is_irreducible(const Poly& m, std::uint64_t p) {
  const std::size_t f = m.size() - 1;
  Poly xp{0, 1};
  for (std::size_t i = 1; i <= f / 2; ++i) {
    xp = poly_powmod(xp, p, m, p);
    Poly d = xp;
    d.resize(std::max<std::size_t>(d.size(), 2), 0);
    d[1] = (d[1] + p - 1) % p;
    Poly g = poly_gcd(m, d, p);
    if (g.size() > 1) return false;
  }
  return true;
}

}  // namespace detail

// F_q with q = p^f and a canonical modulus: the monic irreducible of degree f whose
// lower coefficients (c_{f-1}, ..., c_0) are lexicographically smallest.
class FieldSpec {
 public:
  std::uint32_t p() const { return d_->p; }
  int f() const { return d_->f; }
  std::uint64_t q() const { return d_->q; }
  // Monic modulus, low degree first (length f+1).
  const std::vector<std::uint32_t>& modulus() const { return d_->modulus; }

  Elem zero() const { return {0}; }
  Elem one() const { return {1}; }

  Elem from_int(std::int64_t n) const {
    const std::int64_t p = d_->p;
    std::int64_t r = n % p;
    if (r < 0) r += p;
    return {static_cast<std::uint32_t>(r)};
  }

  Elem add(Elem a, Elem b) const {
    if (d_->f == 1) {
      std::uint64_t s = std::uint64_t(a.v) + b.v;
      return {static_cast<std::uint32_t>(s >= d_->p ? s - d_->p : s)};
    }
    return digitwise(a, b, +1);
  }
  Elem sub(Elem a, Elem b) const {
    if (d_->f == 1) return {a.v >= b.v ? a.v - b.v : static_cast<std::uint32_t>(a.v + d_->p - b.v)};
    return digitwise(a, b, -1);
  }
  Elem neg(Elem a) const { return sub(zero(), a); }

  Elem mul(Elem a, Elem b) const {
    if (d_->f == 1) return {static_cast<std::uint32_t>(std::uint64_t(a.v) * b.v % d_->p)};
    return from_poly(detail::poly_mulmod(to_poly(a), to_poly(b), d_->mod_poly, d_->p));
  }

  Elem pow(Elem a, std::uint64_t e) const {
    Elem r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  Elem inv(Elem a) const {
    if (a.v == 0) throw InvalidInput("inverse of zero in F_q");
    return pow(a, d_->q - 2);
  }

  // Absolute Frobenius x -> x^p and its inverse.
  Elem frob(Elem a) const { return d_->f == 1 ? a : pow(a, d_->p); }
  Elem frob_inv(Elem a) const {
    if (d_->f == 1) return a;
    Elem r = a;
    for (int i = 1; i < d_->f; ++i) r = pow(r, d_->p);
    return r;
  }

  std::vector<std::uint32_t> digits(Elem a) const {
    std::vector<std::uint32_t> out(d_->f);
    std::uint32_t v = a.v;
    for (int i = 0; i < d_->f; ++i) {
      out[i] = v % d_->p;
      v /= d_->p;
    }
    return out;
  }
  Elem from_digits(const std::vector<std::uint32_t>& ds) const {
    std::uint64_t v = 0;
    for (int i = d_->f - 1; i >= 0; --i) v = v * d_->p + (i < int(ds.size()) ? ds[i] % d_->p : 0);
    return {static_cast<std::uint32_t>(v)};
  }

  // All elements, in encoding order.
  std::vector<Elem> elements() const {
    std::vector<Elem> out;
    out.reserve(d_->q);
    for (std::uint64_t v = 0; v < d_->q; ++v) out.push_back({static_cast<std::uint32_t>(v)});
    return out;
  }

  std::string name() const {
    return d_->f == 1 ? "F_" + std::to_string(d_->p)
                      : "F_" + std::to_string(d_->p) + "^" + std::to_string(d_->f);
  }

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) {
    return a.d_ == b.d_ || (a.d_->p == b.d_->p && a.d_->f == b.d_->f);
  }

  friend FieldSpec make_field(std::uint64_t p, int f);

 private:
  struct Data {
    std::uint32_t p;
    int f;
    std::uint64_t q;
    std::vector<std::uint32_t> modulus;
    detail::Poly mod_poly;
  };
  explicit FieldSpec(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  detail::Poly to_poly(Elem a) const {
    detail::Poly r(d_->f);
    std::uint32_t v = a.v;
    for (int i = 0; i < d_->f; ++i) {
      r[i] = v % d_->p;
      v /= d_->p;
    }
    detail::trim(r);
    return r;
  }
  Elem from_poly(const detail::Poly& r) const {
    std::uint64_t v = 0;
    for (int i = int(r.size()) - 1; i >= 0; --i) v = v * d_->p + r[i];
    return {static_cast<std::uint32_t>(v)};
  }
  Elem digitwise(Elem a, Elem b, int sign) const {
    const std::uint32_t p = d_->p;
    std::uint64_t v = 0, scale = 1;
    std::uint32_t x = a.v, y = b.v;
    for (int i = 0; i < d_->f; ++i) {
      std::uint32_t dx = x % p, dy = y % p;
      x /= p;
      y /= p;
      std::uint32_t dz = sign > 0 ? (dx + dy) % p : (dx + p - dy) % p;
      v += dz * scale;
      scale *= p;
    }
    return {static_cast<std::uint32_t>(v)};
  }

  std::shared_ptr<const Data> d_;
};

inline FieldSpec make_field(std::uint64_t p, int f) {
  if (!is_prime(p) || p >= (1ull << 31)) throw InvalidInput("make_field: p must be a prime below 2^31");
  if (f < 1) throw InvalidInput("make_field: extension degree must be >= 1");
  std::uint64_t q = 1;
  for (int i = 0; i < f; ++i) {
    q *= p;
    if (q >= (1ull << 31)) throw InvalidInput("make_field: q = p^f must stay below 2^31");
  }
  auto d = std::make_shared<FieldSpec::Data>();
  d->p = static_cast<std::uint32_t>(p);
  d->f = f;
  d->q = q;
  if (f == 1) {
    d->mod_poly = {0, 1};
  } else {
    // Lexicographic on (c_{f-1}, ..., c_0) is increasing order of sum c_i p^i.
    for (std::uint64_t code = 0; code < q; ++code) {
      detail::Poly m(f + 1, 0);
      std::uint64_t c = code;
      for (int i = 0; i < f; ++i) {
        m[i] = c % p;
        c /= p;
      }
      m[f] = 1;
      if (m[0] == 0) continue;
      if (detail::is_irreducible(m, p)) {
        d->mod_poly = m;
        break;
      }
    }
  }
  d->modulus.assign(d->mod_poly.begin(), d->mod_poly.end());
  return FieldSpec(std::move(d));
}

}  // namespace kisin
