#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "kisin/cm_combinatorics.hpp"
#include "kisin/errors.hpp"
#include "kisin/field.hpp"
#include "kisin/kisin_module.hpp"
#include "kisin/series.hpp"

namespace kisin {

// Polynomial in u with coefficients in (Z/p)[pi]/(pi^nil).
class PiPolynomial {
 public:
  PiPolynomial(std::uint32_t p, int nil) : p_(p), nil_(nil) {
    if (nil < 1) throw InvalidInput("PiPolynomial: nilpotency order must be >= 1");
  }

  static PiPolynomial u_power(std::uint32_t p, int nil, std::int64_t k) {
    PiPolynomial r(p, nil);
    r.set(k, 0, 1);
    return r;
  }
  static PiPolynomial pi_power(std::uint32_t p, int nil, int j) {
    PiPolynomial r(p, nil);
    if (j < nil) r.set(0, j, 1);
    return r;
  }

  std::uint32_t p() const { return p_; }
  int nil() const { return nil_; }
  std::int64_t u_degree() const { return static_cast<std::int64_t>(c_.size() / nil_) - 1; }
  bool is_zero() const { return c_.empty(); }

  std::uint32_t get(std::int64_t du, int j) const {
    if (du < 0 || j < 0 || j >= nil_) return 0;
    const std::size_t idx = static_cast<std::size_t>(du) * nil_ + j;
    return idx < c_.size() ? c_[idx] : 0;
  }

  // Coefficient of pi^j as an F_p[u] polynomial (least degree first).
  std::vector<std::int64_t> pi_coefficient(int j) const {
    std::vector<std::int64_t> out(u_degree() + 1, 0);
    for (std::int64_t du = 0; du <= u_degree(); ++du) out[du] = get(du, j);
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
  }

  friend PiPolynomial operator+(const PiPolynomial& a, const PiPolynomial& b) {
    check(a, b);
    PiPolynomial r(a.p_, a.nil_);
    r.c_.assign(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t i = 0; i < r.c_.size(); ++i)
      r.c_[i] = ((i < a.c_.size() ? a.c_[i] : 0) + (i < b.c_.size() ? b.c_[i] : 0)) % a.p_;
    r.trim();
    return r;
  }

  friend PiPolynomial operator*(const PiPolynomial& a, const PiPolynomial& b) {
    check(a, b);
    PiPolynomial r(a.p_, a.nil_);
    if (a.is_zero() || b.is_zero()) return r;
    const int nil = a.nil_;
    const std::uint64_t p = a.p_;
    const auto ta = a.terms(), tb = b.terms();
    std::vector<std::uint64_t> acc(a.c_.size() + b.c_.size(), 0);
    for (const auto& [ua, ja, ca] : ta)
      for (const auto& [ub, jb, cb] : tb) {
        if (ja + jb >= nil) continue;
        std::uint64_t& slot = acc[static_cast<std::size_t>(ua + ub) * nil + ja + jb];
        slot = (slot + std::uint64_t(ca) * cb) % p;
      }
    r.c_.assign(acc.begin(), acc.end());
    r.trim();
    return r;
  }

  PiPolynomial pow(std::uint64_t e) const {
    PiPolynomial r = u_power(p_, nil_, 0), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  // pi -> c * pi
  PiPolynomial scale_pi(std::uint32_t c) const {
    PiPolynomial r = *this;
    for (std::size_t i = 0; i < r.c_.size(); ++i) {
      const int j = static_cast<int>(i % nil_);
      std::uint64_t f = 1;
      for (int t = 0; t < j; ++t) f = f * c % p_;
      r.c_[i] = static_cast<std::uint32_t>(r.c_[i] * f % p_);
    }
    r.trim();
    return r;
  }

  friend bool operator==(const PiPolynomial& a, const PiPolynomial& b) {
    return a.p_ == b.p_ && a.nil_ == b.nil_ && a.c_ == b.c_;
  }

  void set(std::int64_t du, int j, std::uint32_t v) {
    if (j >= nil_) return;
    const std::size_t idx = static_cast<std::size_t>(du) * nil_ + j;
    if (idx >= c_.size()) c_.resize((static_cast<std::size_t>(du) + 1) * nil_, 0);
    c_[idx] = v % p_;
    trim();
  }

 private:
  struct Term {
    std::int64_t du;
    int j;
    std::uint32_t c;
  };
  std::vector<Term> terms() const {
    std::vector<Term> t;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i]) t.push_back({static_cast<std::int64_t>(i / nil_), static_cast<int>(i % nil_), c_[i]});
    return t;
  }
  static void check(const PiPolynomial& a, const PiPolynomial& b) {
    if (a.p_ != b.p_ || a.nil_ != b.nil_) throw InvalidInput("PiPolynomial: ring mismatch");
  }
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
    // keep whole u-degree blocks
    if (c_.size() % nil_) c_.resize((c_.size() / nil_ + 1) * nil_, 0);
  }

  std::uint32_t p_;
  int nil_;
  std::vector<std::uint32_t> c_;  // index du * nil + j
};

// [pi^s](u) for the Lubin-Tate series [pi](u) = pi u + u^q, computed mod pi^nil.
inline PiPolynomial lt_iterate(std::uint32_t p, std::uint64_t q, int s, int nil) {
  if (s < 0) throw InvalidInput("lt_iterate: s must be >= 0");
  PiPolynomial x = PiPolynomial::u_power(p, nil, 1);
  const PiPolynomial pi = PiPolynomial::pi_power(p, nil, 1);
  for (int i = 0; i < s; ++i) x = pi * x + x.pow(q);
  return x;
}

// h_{pi,s}(u) = pi + ([pi^{s-1}](u))^{q-1}
inline PiPolynomial level_factor(std::uint32_t p, std::uint64_t q, int s, int nil) {
  if (s < 1) throw InvalidInput("level_factor: s must be >= 1");
  return PiPolynomial::pi_power(p, nil, 1) + lt_iterate(p, q, s - 1, nil).pow(q - 1);
}

struct RamifiedPreset {
  std::uint32_t p;
  int h;
  int level;
  std::int64_t e;
};

inline RamifiedPreset make_ramified_preset(std::uint64_t p, int h, int level = -1) {
  if (!is_prime(p) || p > 1000) throw InvalidInput("ramified preset: p must be a small prime");
  if (h != 2 && h != 4) throw InvalidInput("ramified preset: h must be 2 or 4");
  if (h == 4 && !(p == 2 || p % 4 == 1)) throw InvalidInput("ramified preset: cyclic h=4 needs p = 2 or p = 1 mod 4");
  if (level < 0) level = h;
  if (level < 1) throw InvalidInput("ramified preset: level must be >= 1");
  std::int64_t e = h;
  for (int i = 1; i < level; ++i) e *= static_cast<std::int64_t>(p);
  e *= static_cast<std::int64_t>(p) - 1;
  return RamifiedPreset{static_cast<std::uint32_t>(p), h, level, e};
}

enum class UnitChoice { One, RootOfUnity };

inline std::uint32_t primitive_root_of_unity(std::uint32_t p, int order) {
  if ((p - 1) % order != 0) throw InvalidInput("no primitive root of unity of this order in F_p");
  const FieldSpec F = make_field(p, 1);
  for (std::uint32_t g = 1; g < p; ++g) {
    bool ok = F.pow({g}, order) == F.one();
    for (int d = 1; d < order && ok; ++d)
      if (order % d == 0 && F.pow({g}, d) == F.one()) ok = false;
    if (ok) return g;
  }
  throw InvalidInput("no primitive root of unity found");
}

// The coefficients P_0, ..., P_{h-1} of pi^j in prod_{i not in phi} h_{c_i pi, s}(u).
inline std::vector<std::vector<std::int64_t>> ramified_entries(const RamifiedPreset& pr, const std::set<int>& phi,
                                                               UnitChoice units = UnitChoice::One) {
  const std::uint32_t p = pr.p;
  std::vector<std::uint32_t> c(pr.h + 1, 1);
  if (units == UnitChoice::RootOfUnity) {
    const std::uint32_t z = p == 2 ? 1 : primitive_root_of_unity(p, pr.h);
    for (int i = 1; i <= pr.h; ++i) c[i] = static_cast<std::uint32_t>(std::uint64_t(c[i - 1]) * z % p);
  }
  std::uint64_t csum = 0;
  PiPolynomial prod = PiPolynomial::u_power(p, pr.h, 0);
  const PiPolynomial base = level_factor(p, p, pr.level, pr.h);
  for (int i = 1; i <= pr.h; ++i) {
    if (phi.count(i)) continue;
    csum += c[i];
    prod = prod * base.scale_pi(c[i]);
  }
  if (p != 2 && csum % p == 0) throw InvalidInput("ramified preset: sum of conjugate units vanishes mod p");
  std::vector<std::vector<std::int64_t>> out;
  for (int j = 0; j < pr.h; ++j) out.push_back(prod.pi_coefficient(j));
  return out;
}

inline std::set<int> standard_ramified_type(int h) {
  std::set<int> phi;
  for (int i = 1; i <= h / 2; ++i) phi.insert(i);
  return phi;
}

// Upper-triangular Toeplitz matrix A_{i,i+j} = P_j on the basis 1, pi, ..., pi^{h-1}.
// Default precision covers every exterior power: 2 * max_k C(h-1,k-1) * deg(det A) + 1.
inline FiniteKisinModule ramified_frobenius_matrix(const RamifiedPreset& pr, const std::set<int>& phi,
                                                   UnitChoice units = UnitChoice::One, std::int64_t precision = 0) {
  if (static_cast<int>(phi.size()) * 2 != pr.h) throw InvalidInput("ramified preset: |phi| must be h/2");
  const auto P = ramified_entries(pr, phi, units);
  const std::int64_t det_deg = pr.h * static_cast<std::int64_t>(P[0].size() - 1);
  if (precision <= 0) {
    std::int64_t mult = 0;
    for (int k = 1; k <= pr.h; ++k) mult = std::max(mult, binomial(pr.h - 1, k - 1));
    precision = 2 * mult * det_deg + 1;
  }
  const FieldSpec F = make_field(pr.p, 1);
  SeriesMatrix A(F, pr.h, pr.h, precision);
  for (int i = 0; i < pr.h; ++i)
    for (int j = 0; i + j < pr.h; ++j) A(i, i + j) = TruncSeries::from_ints(F, P[j], precision);
  return FiniteKisinModule(std::move(A), pr.e);
}

// Cyclic presentation of an unramified CM module over F_{p^h}: e_i -> e_{i+1}
// with coefficient u^e when i+1 lies in phi, and 1 otherwise.
inline FiniteKisinModule unramified_cm_module(std::uint64_t p, int h, const std::set<int>& phi, std::int64_t e = 1) {
  const CMTypeLocal t = make_cm_type(p, h, phi);
  const FieldSpec F = make_field(p, h);
  std::int64_t ptot = 0, pk = 1;
  for (int i = 0; i < h; ++i, pk *= static_cast<std::int64_t>(p)) ptot += pk;
  const std::int64_t precision = 2 * e * static_cast<std::int64_t>(t.phi.size()) * ptot + 1;
  SeriesMatrix A(F, h, h, precision);
  for (int i = 0; i < h; ++i) {
    const int next = (i + 1) % h;
    A(i, next) = TruncSeries::monomial(F, F.one(), t.phi.count(next + 1) ? e : 0, precision);
  }
  return FiniteKisinModule(std::move(A), e);
}

// Degree conditions under which valuations can be read off a triangular Toeplitz
// matrix from degrees alone: deg a_i strictly decreasing
// and deg(a_i^p a_{k-i+1}) strictly decreasing in i, for 1 <= i < j <= k <= h.
inline bool toeplitz_degree_hypotheses(const std::vector<std::vector<std::int64_t>>& a, std::uint64_t p) {
  const int h = static_cast<int>(a.size());
  std::vector<std::int64_t> deg(h);
  for (int i = 0; i < h; ++i) {
    if (a[i].empty()) return false;
    deg[i] = static_cast<std::int64_t>(a[i].size()) - 1;
  }
  for (int k = 1; k <= h; ++k)
    for (int i = 1; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j) {
        if (!(deg[i - 1] > deg[j - 1])) return false;
        const std::int64_t di = static_cast<std::int64_t>(p) * deg[i - 1] + deg[k - i];
        const std::int64_t dj = static_cast<std::int64_t>(p) * deg[j - 1] + deg[k - j];
        if (!(di > dj)) return false;
      }
  return true;
}

}  // namespace kisin
