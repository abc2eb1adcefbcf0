#include <gtest/gtest.h>

#include "kisin/hn.hpp"
#include "kisin/lubin_tate.hpp"

using namespace kisin;

namespace {

FiniteKisinModule diag2(std::int64_t a, std::int64_t b, std::int64_t e) {
  const FieldSpec F = make_field(2, 1);
  const std::int64_t N = 4 * std::max(a, b) + 8;
  SeriesMatrix A(F, 2, 2, N);
  A(0, 0) = TruncSeries::monomial(F, F.one(), a, N);
  A(1, 1) = TruncSeries::monomial(F, F.one(), b, N);
  return FiniteKisinModule(A, e);
}

}  // namespace

TEST(Slope, DegreeOverRank) {
  const auto m = diag2(0, 6, 3);
  EXPECT_EQ(degree_rank(m).degree, Rational(2));
  EXPECT_EQ(slope(m), Rational(1));
  EXPECT_EQ(submodule_slope(m, 3, 1), Rational(1));
  EXPECT_THROW(slope(DegreeRank{1, 0}), InvalidInput);
}

// 1 and u^{2e}: the line e_0 has degree 0 < 1 = module slope
TEST(Semistability, SplitModuleIsUnstable) {
  const auto m = diag2(0, 4, 2);
  const auto s = is_semistable(m);
  EXPECT_FALSE(s.semistable);
  ASSERT_TRUE(s.violation.has_value());
  EXPECT_EQ(s.violation->second, 0);
  const auto poly = module_hn_polygon(m);
  ASSERT_EQ(poly.breakpoints.size(), 3u);
  EXPECT_EQ(poly.breakpoints[1], std::make_pair(1, Rational(0)));
  EXPECT_EQ(poly.breakpoints[2], std::make_pair(2, Rational(2)));
}

TEST(Semistability, IsoclinicDiagonal) {
  const auto m = diag2(3, 3, 3);
  EXPECT_TRUE(is_semistable(m).semistable);
  const auto poly = module_hn_polygon(m);
  ASSERT_EQ(poly.breakpoints.size(), 2u);
  EXPECT_EQ(poly.breakpoints[1], std::make_pair(2, Rational(2)));
}

TEST(Polygon, ChainsIncrements) {
  const auto ok = hn_polygon({{0, 1}, {1, 1}});
  ASSERT_EQ(ok.breakpoints.size(), 3u);
  EXPECT_EQ(ok.breakpoints.back(), std::make_pair(2, Rational(1)));
  EXPECT_THROW(hn_polygon({{1, 1}, {0, 1}}), InvalidInput);
  // equal slopes merge into one segment
  EXPECT_EQ(hn_polygon({{1, 2}, {make_rational(1, 2), 1}}).breakpoints.size(), 2u);
  EXPECT_THROW(hn_polygon({}), InvalidInput);
  EXPECT_THROW(hn_polygon({{1, 0}}), InvalidInput);
}

// Property: the polygon is convex, starts at 0 and ends at (h, deg M).
TEST(Polygon, ConvexOverPresets) {
  std::vector<FiniteKisinModule> ms;
  for (std::uint64_t p : {2u, 3u, 5u}) ms.push_back(ramified_frobenius_matrix(make_ramified_preset(p, 2), {1}));
  ms.push_back(diag2(0, 4, 2));
  ms.push_back(diag2(1, 7, 1));
  for (const auto& m : ms) {
    const auto poly = module_hn_polygon(m);
    const auto& b = poly.breakpoints;
    EXPECT_EQ(b.front(), std::make_pair(0, Rational(0)));
    EXPECT_EQ(b.back().first, m.rank());
    EXPECT_EQ(b.back().second, degree_rank(m).degree);
    for (std::size_t i = 2; i < b.size(); ++i) {
      const Rational s1 = (b[i - 1].second - b[i - 2].second) / (b[i - 1].first - b[i - 2].first);
      const Rational s2 = (b[i].second - b[i - 1].second) / (b[i].first - b[i - 1].first);
      EXPECT_LT(s1, s2);
    }
  }
}

TEST(Presets, EllipticLevelTwoSemistable) {
  for (std::uint64_t p : {2u, 3u, 5u}) {
    const auto m = ramified_frobenius_matrix(make_ramified_preset(p, 2), {1});
    EXPECT_EQ(slope(m), make_rational(1, 2));
    const auto census = submodule_census(m);
    EXPECT_TRUE(is_semistable(m, census).semistable);
    const auto lv = slope_levels(m, census);
    ASSERT_EQ(lv.size(), 1u);
    EXPECT_EQ(lv[0].equal_mu.size(), 1u);
    EXPECT_EQ(lv[0].equal_first_nonzero, std::vector<int>{1});
    EXPECT_EQ(lv[0].smaller, 0);
  }
}

TEST(Presets, CyclicQuarticAtTwo) {
  const auto m = ramified_frobenius_matrix(make_ramified_preset(2, 4), standard_ramified_type(4));
  EXPECT_EQ(slope(m), make_rational(1, 2));
  const auto census = submodule_census(m);
  EXPECT_TRUE(is_semistable(m, census).semistable);
  const auto poly = module_hn_polygon(m, census);
  EXPECT_EQ(poly.breakpoints.size(), 2u);
  // several equal-slope witnesses per corank at p = 2
  const auto lv = slope_levels(m, census);
  EXPECT_EQ(lv[0].equal_first_nonzero, (std::vector<int>{2, 3}));
  EXPECT_EQ(lv[1].equal_first_nonzero, (std::vector<int>{1, 4, 5}));
  EXPECT_EQ(lv[2].equal_first_nonzero, (std::vector<int>{2, 3}));
  for (const auto& r : lv) EXPECT_EQ(r.smaller, 0);
}

TEST(Presets, StableQuotients) {
  const auto m = ramified_frobenius_matrix(make_ramified_preset(2, 4), standard_ramified_type(4));
  const auto s = stable_quotient_slopes(m, {0, 1, 2, 4});
  ASSERT_EQ(s.size(), 3u);
  // diagonal u^16 with e = 32
  for (const auto& x : s) EXPECT_EQ(x, make_rational(1, 2));
  EXPECT_THROW(stable_quotient_slopes(m, {5}), InvalidInput);
}

TEST(Presets, RankOneIsSemistable) {
  const FieldSpec F = make_field(3, 1);
  SeriesMatrix A(F, 1, 1, 10);
  A(0, 0) = TruncSeries::monomial(F, F.one(), 2, 10);
  EXPECT_TRUE(is_semistable(FiniteKisinModule(A, 1)).semistable);
}
