#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/kisin_module.hpp"
#include "kisin/line_solver.hpp"
#include "kisin/rational.hpp"

namespace kisin {

struct DegreeRank {
  Rational degree;
  int rank;
};

inline DegreeRank degree_rank(const FiniteKisinModule& m) {
  const Valuation v = det_valuation(m);
  return DegreeRank{Rational(v.value()) / m.eisenstein_degree(), m.rank()};
}

inline Rational slope(const DegreeRank& dr) {
  if (dr.rank < 1) throw InvalidInput("slope: rank must be >= 1");
  return dr.degree / dr.rank;
}

inline Rational slope(const FiniteKisinModule& m) { return slope(degree_rank(m)); }

// Slope of the saturated rank-r submodule whose top wedge has valuation mu.
inline Rational submodule_slope(const FiniteKisinModule& m, std::int64_t mu, int rank) {
  return slope(DegreeRank{Rational(mu) / m.eisenstein_degree(), rank});
}

// Witnesses of saturated submodules, indexed by corank 1..h-1 (index 0 unused);
// only decomposable lines of the exterior powers are kept.
using SubmoduleCensus = std::vector<std::vector<EigenLine>>;

inline SubmoduleCensus submodule_census(const FiniteKisinModule& m, const SolverOptions& opt = {}) {
  const int h = m.rank();
  SubmoduleCensus out(h);
  for (int c = 1; c < h; ++c) {
    const int r = h - c;
    SolverOptions o = opt;
    if (r >= 2 && r <= h - 2 && !o.accept)
      o.accept = [h, r](const std::vector<TruncSeries>& x) { return is_decomposable(x, h, r); };
    out[c] = enumerate_lines(wedge_power(m, r), o);
  }
  return out;
}

struct Semistability {
  bool semistable;
  // first violating (corank, mu) if any
  std::optional<std::pair<int, std::int64_t>> violation;
};

// Semistable: every saturated submodule has slope >= the module slope.
inline Semistability is_semistable(const FiniteKisinModule& m, const SubmoduleCensus& census) {
  const int h = m.rank();
  const Rational s = slope(m);
  for (int c = 1; c < h; ++c)
    for (const auto& l : census.at(c))
      if (submodule_slope(m, l.mu.value(), h - c) < s) return Semistability{false, std::make_pair(c, l.mu.value())};
  return Semistability{true, std::nullopt};
}

inline Semistability is_semistable(const FiniteKisinModule& m, const SolverOptions& opt = {}) {
  if (m.rank() == 1) return Semistability{true, std::nullopt};
  return is_semistable(m, submodule_census(m, opt));
}

struct HNPolygon {
  std::vector<std::pair<int, Rational>> breakpoints;  // (rank, degree), from (0, 0)
};

// Chains increments into a polygon. Equal consecutive slopes are merged; a
// decreasing slope is rejected.
inline HNPolygon hn_polygon(const std::vector<DegreeRank>& increments) {
  if (increments.empty()) throw InvalidInput("hn_polygon: no increments");
  HNPolygon poly;
  poly.breakpoints.emplace_back(0, Rational(0));
  std::optional<Rational> last;
  for (const auto& inc : increments) {
    if (inc.rank < 1) throw InvalidInput("hn_polygon: increment rank must be >= 1");
    const Rational sl = slope(inc);
    auto [x, y] = poly.breakpoints.back();
    if (last && sl < *last) throw InvalidInput("hn_polygon: slopes must increase (convexity violated)");
    if (last && sl == *last) poly.breakpoints.pop_back();
    poly.breakpoints.emplace_back(x + inc.rank, y + inc.degree);
    last = sl;
  }
  return poly;
}

// Lower convex hull of the points (rank N, deg N) over all saturated submodules,
// 0 and M included. Needs the solver at every corank, so triangular modules only.
inline HNPolygon module_hn_polygon(const FiniteKisinModule& m, const SubmoduleCensus& census) {
  const int h = m.rank();
  const Rational e(m.eisenstein_degree());
  std::vector<std::optional<Rational>> low(h + 1);
  low[0] = Rational(0);
  low[h] = degree_rank(m).degree;
  for (int c = 1; c < h; ++c)
    for (const auto& l : census.at(c)) {
      const Rational d = Rational(l.mu.value()) / e;
      if (!low[h - c] || d < *low[h - c]) low[h - c] = d;
    }
  std::vector<DegreeRank> inc;
  int x = 0;
  while (x < h) {
    // steepest-descent step: the next hull vertex minimizes the slope from x
    int best = -1;
    Rational best_sl;
    for (int y = x + 1; y <= h; ++y) {
      if (!low[y]) continue;
      const Rational sl = (*low[y] - *low[x]) / (y - x);
      if (best < 0 || sl < best_sl || (sl == best_sl && y > best)) {
        best = y;
        best_sl = sl;
      }
    }
    inc.push_back(DegreeRank{*low[best] - *low[x], best - x});
    x = best;
  }
  return hn_polygon(inc);
}

inline HNPolygon module_hn_polygon(const FiniteKisinModule& m, const SolverOptions& opt = {}) {
  return module_hn_polygon(m, submodule_census(m, opt));
}

// Slopes of the quotients by span(e_k, ..., e_{h-1}) of a triangular CM preset,
// i.e. the modules of G[pi^k]. k = 0 is the zero module and is skipped.
inline std::vector<Rational> stable_quotient_slopes(const FiniteKisinModule& m, const std::vector<int>& ks) {
  if (!m.frobenius().is_upper_triangular()) throw InvalidInput("stable_quotient_slopes: preset must be triangular");
  std::vector<Rational> out;
  for (int k : ks) {
    if (k < 0 || k > m.rank()) throw InvalidInput("stable_quotient_slopes: k out of range");
    if (k == 0) continue;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    const FiniteKisinModule q(m.frobenius().submatrix(idx, idx), m.eisenstein_degree());
    out.push_back(slope(q));
  }
  return out;
}

// Per corank: how many enumerated (decomposable) witnesses meet the module slope,
// and whether the equal one is the O_E-stable submodule span(e_{c}, ..., e_{h-1}).
struct LevelSlopeReport {
  int corank;
  std::vector<std::int64_t> equal_mu;
  std::vector<int> equal_first_nonzero;
  int strictly_greater = 0;
  int smaller = 0;
};

inline std::vector<LevelSlopeReport> slope_levels(const FiniteKisinModule& m, const SubmoduleCensus& census) {
  const int h = m.rank();
  const Rational s = slope(m);
  std::vector<LevelSlopeReport> out;
  for (int c = 1; c < h; ++c) {
    LevelSlopeReport rep{c, {}, {}, 0, 0};
    for (const auto& l : census.at(c)) {
      const Rational sl = submodule_slope(m, l.mu.value(), h - c);
      if (sl == s) {
        rep.equal_mu.push_back(l.mu.value());
        rep.equal_first_nonzero.push_back(l.first_nonzero);
      } else if (sl > s) {
        ++rep.strictly_greater;
      } else {
        ++rep.smaller;
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

inline std::vector<LevelSlopeReport> slope_levels(const FiniteKisinModule& m, const SolverOptions& opt = {}) {
  return slope_levels(m, submodule_census(m, opt));
}

}  // namespace kisin
