#include <gtest/gtest.h>

#include "kisin/cm_combinatorics.hpp"
#include "kisin/kisin_module.hpp"

using namespace kisin;

namespace {

// Brute-force min over all k-subsets, written independently of min_subset_sum.
Integer brute_min(const std::map<int, Integer>& w, int k) {
  std::vector<Integer> v;
  for (auto& [i, x] : w) v.push_back(x);
  const int n = static_cast<int>(v.size());
  Integer best = -1;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    Integer s = 0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) s += v[i];
    if (best < 0 || s < best) best = s;
  }
  return best;
}

}  // namespace

TEST(Weights, QuarticAtThree) {
  const auto w = reflex_weights(make_cm_type(3, 4, {1, 2}));
  std::vector<Integer> got;
  for (auto& [i, x] : w) got.push_back(x);
  EXPECT_EQ(got, (std::vector<Integer>{36, 12, 4, 28}));
  EXPECT_EQ(min_subset_sum(w, 1).value, 4);
  EXPECT_EQ(min_subset_sum(w, 2).value, 16);
  EXPECT_EQ(min_subset_sum(w, 3).value, 44);
}

TEST(Weights, MinSubsetMatchesBruteForce) {
  for (std::uint64_t p : {2u, 3u, 5u})
    for (int h = 2; h <= 5; ++h)
      for (int size = 1; size < h; ++size)
        for (const auto& t : all_cm_types(p, h, size)) {
          const auto w = reflex_weights(t);
          for (int k = 1; k <= h; ++k) EXPECT_EQ(min_subset_sum(w, k).value, brute_min(w, k));
        }
}

// Every weight sum over all shifts is |phi| (1 + p + ... + p^{h-1}).
TEST(Weights, TotalIsConstant) {
  for (std::uint64_t p : {2u, 3u, 7u})
    for (int h = 2; h <= 5; ++h)
      for (int size = 1; size < h; ++size)
        for (const auto& t : all_cm_types(p, h, size)) {
          Integer total = 0;
          for (auto& [i, x] : reflex_weights(t)) total += x;
          EXPECT_EQ(total, size * ((ipow(p, h) - 1) / (p - 1)));
        }
}

TEST(Hodge, EllipticUnramifiedClosedForm) {
  for (std::uint64_t p : {2u, 3u, 5u, 7u})
    for (int n = 1; n <= 3; ++n) {
      const auto t = make_cm_type(p, 2, {1});
      const Rational got = hodge_val_unram_full(t, make_kernel_type({n, 0}));
      EXPECT_EQ(got, make_rational(1, p + 1) * geometric_ratio(p, n)) << p << " " << n;
    }
}

TEST(Hodge, LevelOneIsTorsionValue) {
  for (std::uint64_t p : {2u, 3u, 5u}) {
    const auto t = make_cm_type(p, 4, {1, 2});
    for (int k = 1; k < 4; ++k) {
      std::vector<int> lam(4, 0);
      for (int i = 0; i < k; ++i) lam[i] = 1;
      EXPECT_EQ(hodge_val_unram_full(t, make_kernel_type(lam)), hodge_val_unram_p_torsion(t, k));
    }
  }
}

TEST(Hodge, TorsionAtThree) {
  const auto t = make_cm_type(3, 4, {1, 2});
  EXPECT_EQ(hodge_val_unram_p_torsion(t, 1), Rational(4) * make_rational(2, 80));
  EXPECT_EQ(hodge_val_unram_full(t, make_kernel_type({2, 1, 0, 0})), make_rational(13, 30));
}

TEST(Hodge, MonotoneInLevel) {
  const auto t = make_cm_type(5, 4, {1, 3});
  Rational prev = 0;
  for (int n = 1; n <= 4; ++n) {
    const Rational v = hodge_val_unram_full(t, make_kernel_type({n, 0, 0, 0}));
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(KernelTypes, Enumeration) {
  const auto ks = kernel_types(4, 2, 2);
  ASSERT_EQ(ks.size(), 2u);  // (2,1,0,0), (2,2,0,0)
  for (const auto& k : ks) {
    EXPECT_EQ(k.n, 2);
    EXPECT_EQ(k.k, 2);
  }
  EXPECT_TRUE(kernel_types(4, 1, 4).empty());
  EXPECT_THROW(make_kernel_type({1, 2, 0}), InvalidInput);
}

TEST(Bound, DividingCaseClosedForm) {
  // h/(h-d) = 2: (p-1)/(p^2-1) = 1/(p+1)
  EXPECT_EQ(unram_bound(3, 4, 2, 1, 1), make_rational(1, 4));
  EXPECT_EQ(unram_bound(2, 2, 1, 1, 2), make_rational(1, 3) * make_rational(3, 2));
  EXPECT_EQ(unram_bound(3, 4, 2, 1, 0), Rational(0));
}

TEST(Bound, DominatesEveryType) {
  for (std::uint64_t p : {2u, 3u}) {
    const int h = 3, d = 1, n = 2;
    for (int k = 1; k < h; ++k) {
      const Rational b = unram_bound(p, h, d, k, n);
      for (const auto& t : all_cm_types(p, h, h - d))
        for (const auto& kt : kernel_types(h, n, k)) EXPECT_LE(hodge_val_unram_full(t, kt), b);
    }
  }
}

TEST(CMType, Validation) {
  EXPECT_THROW(make_cm_type(4, 2, {1}), InvalidInput);
  EXPECT_THROW(make_cm_type(3, 2, {}), InvalidInput);
  EXPECT_THROW(make_cm_type(3, 2, {1, 2}), InvalidInput);
  EXPECT_THROW(make_cm_type(3, 2, {3}), InvalidInput);
}
