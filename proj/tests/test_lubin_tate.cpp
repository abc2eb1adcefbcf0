#include <gtest/gtest.h>

#include "kisin/lubin_tate.hpp"

using namespace kisin;

namespace {

std::vector<std::int64_t> poly(std::initializer_list<std::int64_t> degs) {
  std::int64_t top = 0;
  for (auto d : degs) top = std::max(top, d);
  std::vector<std::int64_t> v(top + 1, 0);
  for (auto d : degs) v[d] = 1;
  return v;
}

}  // namespace

TEST(LubinTate, IterateIsPolynomialInPi) {
  // [pi](u) = pi u + u^q, so the first iterate has pi^0 part u^q and pi^1 part u
  const auto x = lt_iterate(3, 3, 1, 2);
  EXPECT_EQ(x.pi_coefficient(0), poly({3}));
  EXPECT_EQ(x.pi_coefficient(1), poly({1}));
  EXPECT_EQ(lt_iterate(3, 3, 0, 2), PiPolynomial::u_power(3, 2, 1));
  EXPECT_THROW(lt_iterate(3, 3, -1, 2), InvalidInput);
}

// u^8 + pi(u^4 + 1) + pi^2(u^4 + u^2) + pi^3(u^2 + u) mod pi^4, at p = 2
TEST(LubinTate, LevelFactorAtTwo) {
  const auto f = level_factor(2, 2, 4, 4);
  EXPECT_EQ(f.pi_coefficient(0), poly({8}));
  EXPECT_EQ(f.pi_coefficient(1), poly({0, 4}));
  EXPECT_EQ(f.pi_coefficient(2), poly({2, 4}));
  EXPECT_EQ(f.pi_coefficient(3), poly({1, 2}));
}

TEST(Preset, EisensteinDegree) {
  EXPECT_EQ(make_ramified_preset(2, 4).e, 32);
  EXPECT_EQ(make_ramified_preset(5, 4).e, 4 * 125 * 4);
  for (std::uint64_t p : {2u, 3u, 5u}) EXPECT_EQ(make_ramified_preset(p, 2).e, std::int64_t(2 * p * (p - 1)));
  EXPECT_THROW(make_ramified_preset(3, 4), InvalidInput);
  EXPECT_THROW(make_ramified_preset(5, 3), InvalidInput);
  EXPECT_THROW(make_ramified_preset(6, 2), InvalidInput);
}

TEST(Preset, CyclicQuarticEntriesAtTwo) {
  const auto P = ramified_entries(make_ramified_preset(2, 4), standard_ramified_type(4));
  ASSERT_EQ(P.size(), 4u);
  auto nz = [](const std::vector<std::int64_t>& v) {
    for (auto c : v)
      if (c % 2) return true;
    return false;
  };
  EXPECT_EQ(P[0], poly({16}));
  EXPECT_FALSE(nz(P[1]));
  EXPECT_EQ(P[2], poly({0, 8}));
  EXPECT_FALSE(nz(P[3]));
}

TEST(Preset, CyclicQuarticDegreesAtFive) {
  const auto P = ramified_entries(make_ramified_preset(5, 4), standard_ramified_type(4));
  // deg P_i = 2p^4 - 3p^3 + p^{4-i}
  const std::int64_t expect[4] = {1000, 900, 880, 876};
  for (int i = 0; i < 4; ++i) {
    std::int64_t d = static_cast<std::int64_t>(P[i].size()) - 1;
    while (d >= 0 && P[i][d] % 5 == 0) --d;
    EXPECT_EQ(d, expect[i]) << i;
  }
  // P_2 has a unit constant term, so degree conditions alone
  // do not describe valuations here; they fail outright on degrees as well
  EXPECT_NE(P[2][0] % 5, 0);
  EXPECT_FALSE(toeplitz_degree_hypotheses(P, 5));
}

TEST(Preset, ToeplitzHypothesesOnSyntheticDegrees) {
  // degrees 10 > 5 > 2: a_i^p a_{k-i+1} strictly decreasing for p = 3
  EXPECT_TRUE(toeplitz_degree_hypotheses({poly({10}), poly({5}), poly({2})}, 3));
  EXPECT_FALSE(toeplitz_degree_hypotheses({poly({5}), poly({5})}, 3));
}

TEST(Preset, MatrixShapeAndDeterminant) {
  for (std::uint64_t p : {2u, 3u, 5u}) {
    const auto pr = make_ramified_preset(p, 2);
    const auto m = ramified_frobenius_matrix(pr, standard_ramified_type(2));
    EXPECT_TRUE(m.frobenius().is_upper_triangular());
    EXPECT_EQ(m.frobenius()(0, 0), m.frobenius()(1, 1));
    // slope 1/2: v(det) = e h / 2
    EXPECT_EQ(det_valuation(m).value(), pr.e);
  }
  const auto m2 = ramified_frobenius_matrix(make_ramified_preset(2, 4), standard_ramified_type(4));
  EXPECT_EQ(m2.precision(), 385);
  EXPECT_EQ(det_valuation(m2).value(), 64);
  EXPECT_THROW(ramified_frobenius_matrix(make_ramified_preset(2, 4), {1}), InvalidInput);
}

TEST(Preset, RootOfUnityUnits) {
  EXPECT_EQ(primitive_root_of_unity(5, 4) * primitive_root_of_unity(5, 4) % 5, 4u);
  // units z, z^2 with z of order 2 in F_5; the sum outside phi is z^2 = 1
  const auto P = ramified_entries(make_ramified_preset(5, 2), {1}, UnitChoice::RootOfUnity);
  EXPECT_EQ(P.size(), 2u);
  EXPECT_THROW(primitive_root_of_unity(7, 4), InvalidInput);
}

TEST(Unramified, CyclicPresentation) {
  const auto m = unramified_cm_module(3, 4, {1, 2}, 2);
  EXPECT_EQ(m.field().f(), 4);
  EXPECT_EQ(m.eisenstein_degree(), 2);
  EXPECT_EQ(det_valuation(m).value(), 4);  // |phi| e
  for (int i = 0; i < 4; ++i) EXPECT_FALSE(m.frobenius()(i, (i + 1) % 4).is_zero());
}
