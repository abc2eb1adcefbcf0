#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmp.h>

#include "kisin/cm_combinatorics.hpp"
#include "kisin/errors.hpp"
#include "kisin/field.hpp"
#include "kisin/rational.hpp"

namespace kisin {

// Delta h_Fal = c log p, or a bound / range for c.
struct HeightDelta {
  enum class Qualifier { Exact, LowerBound, Range };
  Rational coefficient;  // the value, the bound, or the range minimum
  std::uint64_t prime;
  Qualifier qualifier = Qualifier::Exact;
  Rational range_min, range_max;  // only for Range
};

inline const char* qualifier_name(HeightDelta::Qualifier q) {
  switch (q) {
    case HeightDelta::Qualifier::Exact: return "exact";
    case HeightDelta::Qualifier::LowerBound: return "lower_bound";
    case HeightDelta::Qualifier::Range: return "range";
  }
  return "?";
}

inline HeightDelta exact_delta(Rational c, std::uint64_t p) { return HeightDelta{std::move(c), p, HeightDelta::Qualifier::Exact, 0, 0}; }

// c = (log_p deg)/2 - hodge
inline HeightDelta isogeny_delta(const Rational& log_deg_coeff, const Rational& hodge_coeff, std::uint64_t p) {
  if (hodge_coeff < 0) throw InvalidInput("isogeny_delta: Hodge coefficient must be >= 0");
  return exact_delta(log_deg_coeff / 2 - hodge_coeff, p);
}

// chi_d(p) for the quadratic field of discriminant d, i.e. the Kronecker symbol (d/p).
inline int kronecker_symbol(std::uint64_t p, std::int64_t d) {
  if (!is_prime(p)) throw InvalidInput("kronecker_symbol: p must be prime");
  Integer a(static_cast<long>(d)), b(static_cast<unsigned long>(p));
  return mpz_kronecker(a.get_mpz_t(), b.get_mpz_t());
}

// Trial division; n is small in every use here.
inline std::map<std::uint64_t, int> factorize(std::uint64_t n) {
  if (n == 0) throw InvalidInput("factorize: n must be positive");
  std::map<std::uint64_t, int> out;
  for (std::uint64_t q = 2; q * q <= n; ++q)
    while (n % q == 0) {
      ++out[q];
      n /= q;
    }
  if (n > 1) ++out[n];
  return out;
}

inline Rational isogeny_series(std::uint64_t p, int n) { return geometric_ratio(p, n); }

inline std::vector<HeightDelta> elliptic_delta(std::int64_t d, const std::map<std::uint64_t, int>& n_factorization) {
  if (d == 0) throw InvalidInput("elliptic_delta: discriminant must be nonzero");
  if (d > 0) throw InvalidInput("elliptic_delta: discriminant must be negative");
  const std::int64_t r4 = ((d % 4) + 4) % 4;
  if (r4 != 0 && r4 != 1) throw InvalidInput("elliptic_delta: discriminant must be 0 or 1 mod 4");
  std::vector<HeightDelta> out;
  for (const auto& [p, r] : n_factorization) {
    if (r < 1) throw InvalidInput("elliptic_delta: exponents must be positive");
    const int chi = kronecker_symbol(p, d);
    const Rational corr = make_rational(Integer(1 - chi), Integer(static_cast<long>(p)) - chi) * geometric_ratio(p, r);
    out.push_back(exact_delta((Rational(r) - corr) / 2, p));
  }
  return out;
}

struct SurfaceKernelSpec {
  int n;
  std::array<int, 3> lambdas;
};

// Non-increasing, as even as possible.
inline SurfaceKernelSpec balanced_kernel(int n) {
  if (n < 0) throw InvalidInput("balanced_kernel: n must be >= 0");
  const int q = n / 3, r = n % 3;
  return SurfaceKernelSpec{n, {q + (r > 0), q + (r > 1), q}};
}

inline SurfaceKernelSpec make_surface_kernel(int n, std::array<int, 3> l) {
  if (l[0] < l[1] || l[1] < l[2] || l[2] < 0) throw InvalidInput("surface kernel: lambdas must be non-increasing and >= 0");
  if (l[0] + l[1] + l[2] != n) throw InvalidInput("surface kernel: lambdas must sum to n");
  return SurfaceKernelSpec{n, l};
}

inline bool case9_prime(std::uint64_t p) { return p == 2 || p % 4 == 1; }

// Value sets R_1, R_2, R_3.
inline std::array<std::vector<Integer>, 3> r_polynomials(std::uint64_t p) {
  if (!is_prime(p)) throw InvalidInput("r_polynomials: p must be prime");
  if (!case9_prime(p)) throw InvalidInput("r_polynomials: need p = 2 or p = 1 mod 4");
  if (p == 2) return {{{8}, {24}, {40}}};
  const Integer P(static_cast<unsigned long>(p));
  const Integer P2 = P * P, P3 = P2 * P, P4 = P3 * P;
  return {{{P4 - P2, P4 - P3 + P2 - P, P4 - P3 + P - 1},
           {3 * P4 - 2 * P3 - P2, 3 * P4 - 3 * P3 + P2 - P, 3 * P4 - 3 * P3 + P - 1, 2 * P4 - 2 * P2,
            2 * P4 - P3 - P2 + P - 1},
           {5 * P4 - 4 * P3 - P2, 5 * P4 - 5 * P3 + P2 - P, 5 * P4 - 5 * P3 + P - 1}}};
}

namespace detail {

// sum_{i=lo}^{hi} p^{-(i-1)}; nullopt when the range is empty
inline std::optional<Rational> level_sum(std::uint64_t p, int lo, int hi) {
  if (hi < lo) return std::nullopt;
  Rational s = 0;
  for (int i = lo; i <= hi; ++i) s += inv_pow(p, i - 1);
  return s;
}

// Level ranges of the three factors: (l2, l1], (l3, l2], (0, l3].
inline std::array<std::optional<Rational>, 3> level_sums(std::uint64_t p, const SurfaceKernelSpec& s) {
  const auto& l = s.lambdas;
  return {level_sum(p, l[1] + 1, l[0]), level_sum(p, l[2] + 1, l[1]), level_sum(p, 1, l[2])};
}

// Product over the nonempty factors of w_t * sums_t; 0 if every factor is empty.
inline Rational factor_product(const std::array<std::optional<Rational>, 3>& sums, const std::array<Rational, 3>& w) {
  Rational prod = 1;
  bool any = false;
  for (int t = 0; t < 3; ++t) {
    if (!sums[t]) continue;
    prod *= w[t] * *sums[t];
    any = true;
  }
  return any ? prod : Rational(0);
}

}  // namespace detail

// Hodge correction of the inert surface case; the level-j term carries p^{-(j-1)}.
inline Rational surface_case8_correction(std::uint64_t p, const SurfaceKernelSpec& s) {
  const Rational P(static_cast<unsigned long>(p));
  const std::array<Rational, 3> w{P + 1, (P + 1) * (P + 1), (P * P + 2) * (P + 1)};
  return unram_normalizer(p, 4) * detail::factor_product(detail::level_sums(p, s), w);
}

inline HeightDelta surface_delta(int case_id, std::uint64_t p, const SurfaceKernelSpec& spec) {
  if (!is_prime(p)) throw InvalidInput("surface_delta: p must be prime");
  if (spec.n < 0) throw InvalidInput("surface_delta: n must be >= 0");
  const Rational half_n = Rational(spec.n) / 2;
  const Rational P(static_cast<unsigned long>(p));
  const Rational G = geometric_ratio(p, spec.n);
  switch (case_id) {
    case 1:
    case 2:
    case 3: return exact_delta(half_n, p);
    case 4: return exact_delta(half_n - G / (P + 1), p);
    case 5: return exact_delta(half_n - G / (2 * P), p);
    case 6: return exact_delta(half_n - 2 * G / (P + 1), p);
    case 7: return exact_delta(half_n - G / (P * (P + 1)), p);
    case 8: {
      make_surface_kernel(spec.n, spec.lambdas);
      return exact_delta(half_n - surface_case8_correction(p, spec), p);
    }
    case 9: {
      make_surface_kernel(spec.n, spec.lambdas);
      if (!case9_prime(p)) throw InvalidInput("surface_delta: case 9 needs p = 2 or p = 1 mod 4");
      const auto R = r_polynomials(p);
      const auto sums = detail::level_sums(p, spec);
      const Rational pre = 1 / (4 * (P * P * P * P - P * P * P));
      // correction is increasing in each R, so the extremes use the extreme values
      std::array<Rational, 3> lo, hi;
      for (int t = 0; t < 3; ++t) {
        lo[t] = Rational(*std::min_element(R[t].begin(), R[t].end()));
        hi[t] = Rational(*std::max_element(R[t].begin(), R[t].end()));
      }
      const Rational cmax = half_n - pre * detail::factor_product(sums, lo);
      const Rational cmin = half_n - pre * detail::factor_product(sums, hi);
      if (cmin == cmax) return exact_delta(cmin, p);
      return HeightDelta{cmin, p, HeightDelta::Qualifier::Range, cmin, cmax};
    }
    default: throw InvalidInput("surface_delta: case must be 1..9");
  }
}

// One prime of E above p.
struct PrimeDescriptor {
  int nu = 1;       // ramification index
  int f = 1;        // residue degree
  bool ramified_in_cm = false;
  int rho = 1;      // degree of the Galois closure, ramified primes only
  int h = 1, d = 0; // local height and dimension, ramified primes only
  int n = 0, k = 0; // kernel level and p-height at this prime
};

struct GeneralDescriptor {
  std::vector<PrimeDescriptor> primes;
  std::optional<int> degree;  // [E:Q_p] if given; must equal sum nu f
};

inline HeightDelta general_delta_bound(const GeneralDescriptor& desc, int r, std::uint64_t p) {
  if (!is_prime(p)) throw InvalidInput("general_delta_bound: p must be prime");
  if (desc.primes.empty()) throw InvalidInput("general_delta_bound: no primes");
  if (r < 0) throw InvalidInput("general_delta_bound: r must be >= 0");
  int deg = 0;
  bool split = true;
  for (const auto& q : desc.primes) {
    if (q.nu < 1 || q.f < 1 || q.rho < 1 || q.n < 0 || q.k < 0) throw InvalidInput("general_delta_bound: bad prime descriptor");
    if (q.ramified_in_cm && (q.h < 1 || q.d < 0 || q.d > q.h)) throw InvalidInput("general_delta_bound: bad local height");
    deg += q.nu * q.f;
    split = split && q.nu == 1 && q.f == 1 && !q.ramified_in_cm;
  }
  if (desc.degree && *desc.degree != deg) throw InvalidInput("general_delta_bound: sum of nu*f differs from the degree");
  const Rational half_r = Rational(r) / 2;
  if (split) return exact_delta(half_r, p);
  Rational corr = 0;
  for (const auto& q : desc.primes) {
    const Rational norm = make_rational(Integer(static_cast<unsigned long>(p - 1)), ipow(p, q.f) - 1);
    if (!q.ramified_in_cm) {
      if (q.f > 1) corr += q.nu * norm * geometric_ratio(p, q.k) * geometric_ratio(p, q.n);
    } else {
      corr += norm * make_rational(q.h - q.d, q.h) * geometric_ratio(p, q.n) / q.rho;
    }
  }
  return HeightDelta{half_r - corr, p, HeightDelta::Qualifier::LowerBound, 0, 0};
}

}  // namespace kisin
