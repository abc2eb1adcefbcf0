#include <gtest/gtest.h>

#include <random>

#include "kisin/line_solver.hpp"
#include "kisin/lubin_tate.hpp"

using namespace kisin;

namespace {

FiniteKisinModule upper2(const FieldSpec& F, std::vector<std::int64_t> a, std::vector<std::int64_t> b,
                         std::vector<std::int64_t> d, std::int64_t prec) {
  SeriesMatrix A(F, 2, 2, prec);
  A(0, 0) = TruncSeries::from_ints(F, a, prec);
  A(0, 1) = TruncSeries::from_ints(F, b, prec);
  A(1, 1) = TruncSeries::from_ints(F, d, prec);
  return FiniteKisinModule(A, 1);
}

// Naive eigen-check: phi(f) = g f for a saturated polynomial vector f.
std::optional<std::int64_t> naive_mu(const FiniteKisinModule& m, const std::vector<TruncSeries>& f) {
  const int h = m.rank();
  const FieldSpec& F = m.field();
  const std::int64_t N = m.precision();
  std::vector<TruncSeries> phi(h, TruncSeries(F, N));
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < h; ++i) phi[j] = phi[j] + frobenius_sigma(f[i]) * m.frobenius()(i, j);
  int piv = -1;
  for (int i = 0; i < h && piv < 0; ++i)
    if (f[i].coeff(0).v) piv = i;
  if (piv < 0) return std::nullopt;
  const auto g = phi[piv] * f[piv].unit_inverse();
  for (int j = 0; j < h; ++j)
    if (!(phi[j] - g * f[j]).is_zero()) return std::nullopt;
  return valuation(g).value();
}

// All saturated polynomial vectors of degree < D over F_2.
std::set<std::int64_t> brute_mus(const FiniteKisinModule& m, int D) {
  const FieldSpec& F = m.field();
  const int h = m.rank();
  std::set<std::int64_t> out;
  const std::uint64_t total = 1ull << (h * D);
  for (std::uint64_t code = 1; code < total; ++code) {
    std::vector<TruncSeries> f;
    for (int i = 0; i < h; ++i) {
      std::vector<std::int64_t> c(D);
      for (int k = 0; k < D; ++k) c[k] = code >> (i * D + k) & 1;
      f.push_back(TruncSeries::from_ints(F, c, m.precision()));
    }
    if (auto mu = naive_mu(m, f)) out.insert(*mu);
  }
  return out;
}

std::vector<TruncSeries> wedge_vectors(const std::vector<std::vector<TruncSeries>>& vs, int n) {
  const int r = static_cast<int>(vs.size());
  std::vector<TruncSeries> out;
  for (const auto& I : k_subsets(n, r)) {
    SeriesMatrix M(vs[0][0].field(), r, r, vs[0][0].precision());
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) M(a, b) = vs[a][I[b]];
    out.push_back(determinant(M));
  }
  return out;
}

}  // namespace

TEST(Lines, DiagonalExample) {
  const FieldSpec F = make_field(2, 1);
  const auto m = upper2(F, {0, 0, 1}, {}, {0, 0, 0, 0, 0, 1}, 40);
  const auto lines = enumerate_lines(m);
  EXPECT_EQ(mu_set(lines), (std::set<std::int64_t>{2, 5}));
  for (const auto& l : lines) EXPECT_EQ(naive_mu(m, l.generator), l.mu.value());
}

TEST(Lines, AgreeWithBruteForceOverF2) {
  const FieldSpec F = make_field(2, 1);
  const std::vector<FiniteKisinModule> ms = {
      upper2(F, {0, 0, 1}, {1, 1}, {0, 0, 0, 1}, 60),
      upper2(F, {0, 1}, {0, 0, 1}, {0, 0, 0, 0, 1}, 60),
      upper2(F, {0, 0, 1}, {0, 0, 0, 0, 1}, {0, 0, 0, 0, 0, 0, 1}, 60),
  };
  for (const auto& m : ms) {
    const auto lines = enumerate_lines(m);
    const auto got = mu_set(lines);
    const auto brute = brute_mus(m, 6);
    // polynomial witnesses of bounded degree can only find a subset
    EXPECT_TRUE(std::includes(got.begin(), got.end(), brute.begin(), brute.end()));
    for (const auto& l : lines) EXPECT_EQ(naive_mu(m, l.generator), l.mu.value());
    for (auto mu : got) EXPECT_LE(mu, det_valuation(m).value());
  }
}

TEST(Lines, EllipticLevelTwoPresets) {
  for (std::uint64_t p : {2u, 3u, 5u}) {
    const auto pr = make_ramified_preset(p, 2);
    const auto m = ramified_frobenius_matrix(pr, standard_ramified_type(2));
    const std::int64_t e = pr.e;
    const std::int64_t P = static_cast<std::int64_t>(p);
    EXPECT_EQ(submodule_valuations(m, 1), (std::set<std::int64_t>{e / 2, (2 * P - 1) * e / (2 * P)})) << p;
  }
}

TEST(Lines, CyclicQuarticAtTwo) {
  const auto m = ramified_frobenius_matrix(make_ramified_preset(2, 4), standard_ramified_type(4));
  EXPECT_EQ(submodule_valuations(m, 3), (std::set<std::int64_t>{16, 24}));
  EXPECT_EQ(submodule_valuations(m, 1), (std::set<std::int64_t>{48, 56}));
  // 48 also occurs in rank 2, see the witness below
  EXPECT_EQ(submodule_valuations(m, 2), (std::set<std::int64_t>{32, 40, 48}));
}

// (u^8 e0 + e2) ^ (u^8 e1 + e3) is phi-stable with eigenvalue u^48.
TEST(Lines, RankTwoWitnessAtFortyEight) {
  const auto m = ramified_frobenius_matrix(make_ramified_preset(2, 4), standard_ramified_type(4));
  const FieldSpec& F = m.field();
  const std::int64_t N = m.precision();
  auto mono = [&](std::int64_t d) { return TruncSeries::monomial(F, F.one(), d, N); };
  const TruncSeries Z(F, N);
  const std::vector<std::vector<TruncSeries>> vs = {{mono(8), Z, mono(0), Z}, {Z, mono(8), Z, mono(0)}};
  const auto x = wedge_vectors(vs, 4);
  // lexicographic basis 01, 02, 03, 12, 13, 23
  EXPECT_EQ(x[0], mono(16));
  EXPECT_TRUE(x[1].is_zero());
  EXPECT_EQ(x[2], mono(8));
  EXPECT_EQ(x[3], mono(8));
  EXPECT_TRUE(x[4].is_zero());
  EXPECT_EQ(x[5], mono(0));
  EXPECT_TRUE(is_decomposable(x, 4, 2));
  const auto W = wedge_power(m, 2);
  EXPECT_EQ(naive_mu(W, x), 48);
  EXPECT_EQ(verify_line(W, x), Valuation(48));
  // each factor is itself a line (u^8 x, u^8 y, x, y) with eigenvalue u^24
  EXPECT_EQ(naive_mu(m, vs[0]), 24);
  EXPECT_EQ(naive_mu(m, vs[1]), 24);
}

TEST(Plucker, DecomposableWedgesPass) {
  std::mt19937 rng(23);
  const FieldSpec F = make_field(3, 1);
  std::uniform_int_distribution<int> c(0, 2);
  for (int n : {4, 5}) {
    for (int r = 2; r <= n - 2; ++r) {
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<TruncSeries>> vs(r);
        for (auto& v : vs)
          for (int i = 0; i < n; ++i) v.push_back(TruncSeries::from_ints(F, {c(rng), c(rng), c(rng)}, 30));
        EXPECT_TRUE(is_decomposable(wedge_vectors(vs, n), n, r));
      }
    }
  }
}

TEST(Plucker, SymplecticFormFails) {
  const FieldSpec F = make_field(2, 1);
  std::vector<TruncSeries> x(6, TruncSeries(F, 10));
  x[0] = TruncSeries::monomial(F, F.one(), 0, 10);  // e01
  x[5] = TruncSeries::monomial(F, F.one(), 0, 10);  // e23
  EXPECT_FALSE(is_decomposable(x, 4, 2));
  EXPECT_TRUE(is_decomposable(x, 4, 1));
  EXPECT_THROW(is_decomposable(std::vector<TruncSeries>(5, TruncSeries(F, 10)), 4, 2), InvalidInput);
}

TEST(Lines, Validation) {
  const FieldSpec F = make_field(2, 1);
  SeriesMatrix A(F, 2, 2, 10);
  A(0, 0) = TruncSeries::monomial(F, F.one(), 1, 10);
  A(1, 0) = TruncSeries::monomial(F, F.one(), 0, 10);
  A(1, 1) = TruncSeries::monomial(F, F.one(), 1, 10);
  EXPECT_THROW(enumerate_lines(FiniteKisinModule(A, 1)), InvalidInput);
  const auto m = ramified_frobenius_matrix(make_ramified_preset(2, 2), standard_ramified_type(2));
  EXPECT_THROW(submodule_valuations(m, 0), InvalidInput);
  EXPECT_THROW(submodule_valuations(m, 2), InvalidInput);
  EXPECT_EQ(hodge_exponent_of_subgroup(m, Valuation(1)), Valuation(det_valuation(m).value() - 1));
}

TEST(Lines, ShortPrecisionIsReported) {
  const auto pr = make_ramified_preset(3, 2);
  const auto m = ramified_frobenius_matrix(pr, standard_ramified_type(2), UnitChoice::One, 5);
  EXPECT_THROW(submodule_valuations(m, 1), PrecisionExhausted);
}
