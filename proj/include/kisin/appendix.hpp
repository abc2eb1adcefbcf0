#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/hn.hpp"
#include "kisin/line_solver.hpp"
#include "kisin/lubin_tate.hpp"

namespace kisin {

// Submodule valuations claimed for the cyclic h = 4 preset, keyed by corank.
// At p = 2 the claim is the full set; for p = 1 mod 4 corank 3 is claimed in full
// and coranks 1, 2 only as a list of candidates.
struct AppendixClaim {
  int corank;
  std::set<std::int64_t> values;
  bool exact;  // false: computed values must form a subset
};

inline std::vector<AppendixClaim> appendix_claims(std::uint64_t p) {
  if (p == 2) return {{1, {48, 56}, true}, {2, {32, 40}, true}, {3, {16, 24}, true}};
  if (p % 4 != 1 || !is_prime(p)) throw InvalidInput("appendix: p must be 2 or a prime = 1 mod 4");
  const std::int64_t P = static_cast<std::int64_t>(p);
  const std::int64_t P2 = P * P, P3 = P2 * P, P4 = P3 * P;
  return {
      {1, {6 * P4 - 6 * P3, 7 * P4 - 8 * P3 + P2, 7 * P4 - 7 * P3 - P2 + P, 7 * P4 - 7 * P3 - P + 1}, false},
      {2,
       {4 * P4 - 4 * P3, 5 * P4 - 6 * P3 + P2, 5 * P4 - 5 * P3 - P2 + P, 5 * P4 - 5 * P3 - P + 1,
        6 * P4 - 8 * P3 + 2 * P2, 6 * P4 - 7 * P3 + P2 - P + 1},
       false},
      {3, {2 * P4 - 2 * P3, 3 * P4 - 4 * P3 + P2, 3 * P4 - 3 * P3 - P2 + P, 3 * P4 - 3 * P3 - P + 1}, true},
  };
}

struct AppendixResult {
  int corank;
  std::set<std::int64_t> claimed;
  bool exact;
  std::set<std::int64_t> computed;
  bool pass;
};

inline FiniteKisinModule cyclic_h4_preset(std::uint64_t p, std::int64_t precision = 0) {
  return ramified_frobenius_matrix(make_ramified_preset(p, 4), standard_ramified_type(4), UnitChoice::One, precision);
}

inline std::vector<AppendixResult> verify_appendix(std::uint64_t p, const SolverOptions& opt = {},
                                                   std::int64_t precision = 0) {
  const auto claims = appendix_claims(p);
  const FiniteKisinModule m = cyclic_h4_preset(p, precision);
  std::vector<AppendixResult> out;
  for (const auto& c : claims) {
    auto got = submodule_valuations(m, c.corank, opt);
    const bool pass = c.exact ? got == c.values
                              : std::includes(c.values.begin(), c.values.end(), got.begin(), got.end());
    out.push_back(AppendixResult{c.corank, c.values, c.exact, std::move(got), pass});
  }
  return out;
}

// det - mu over the non-stable values of one corank (the stable one has the module slope).
inline std::set<std::int64_t> hodge_values(const FiniteKisinModule& m, int corank, const std::set<std::int64_t>& mus) {
  const std::int64_t d = det_valuation(m).value();
  const Rational s = slope(m);
  std::set<std::int64_t> out;
  for (auto mu : mus)
    if (submodule_slope(m, mu, m.rank() - corank) != s) out.insert(d - mu);
  return out;
}

}  // namespace kisin
