#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/field.hpp"
#include "kisin/kisin_module.hpp"
#include "kisin/rational.hpp"

namespace kisin {

// A local CM type: phi is a subset of {1, ..., h} with |phi| = h - d.
struct CMTypeLocal {
  int h;
  std::set<int> phi;
  std::uint64_t p;

  int d() const { return h - static_cast<int>(phi.size()); }
};

inline CMTypeLocal make_cm_type(std::uint64_t p, int h, std::set<int> phi) {
  if (!is_prime(p)) throw InvalidInput("CM type: p must be prime");
  if (h < 2) throw InvalidInput("CM type: h must be >= 2");
  if (phi.empty() || static_cast<int>(phi.size()) >= h) throw InvalidInput("CM type: need 1 <= |phi| <= h-1");
  for (int a : phi)
    if (a < 1 || a > h) throw InvalidInput("CM type: elements must lie in {1..h}");
  return CMTypeLocal{h, std::move(phi), p};
}

// Kernel type (lambda_1 >= ... >= lambda_h), n = lambda_1, k = largest index with lambda_k != 0.
struct KernelType {
  std::vector<int> lambdas;
  int n;
  int k;
};

inline KernelType make_kernel_type(std::vector<int> lambdas) {
  if (lambdas.empty()) throw InvalidInput("kernel type: empty lambda tuple");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 0) throw InvalidInput("kernel type: negative lambda");
    if (i > 0 && lambdas[i] > lambdas[i - 1]) throw InvalidInput("kernel type: lambdas must be non-increasing");
  }
  int k = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] != 0) k = static_cast<int>(i) + 1;
  if (k >= static_cast<int>(lambdas.size())) throw InvalidInput("kernel type: p-height must be < h");
  const int n = lambdas.front();
  return KernelType{std::move(lambdas), n, k};
}

// w_tau = sum_s p^{h - tau^{-1}(alpha_s)} for the h cyclic shifts, indexed t = 0..h-1
// with tau^{-1}(alpha) = alpha + t mod h.
inline std::map<int, Integer> reflex_weights(const CMTypeLocal& t) {
  std::map<int, Integer> w;
  for (int shift = 0; shift < t.h; ++shift) {
    Integer s = 0;
    for (int a : t.phi) {
      int pre = (a - 1 + shift) % t.h + 1;
      s += ipow(t.p, static_cast<unsigned long>(t.h - pre));
    }
    w[shift] = s;
  }
  return w;
}

struct MinSubset {
  Integer value;
  std::vector<int> subset;
};

// Smallest k-subset sum; ties go to the lexicographically smallest key set.
inline MinSubset min_subset_sum(const std::map<int, Integer>& weights, int k) {
  const int n = static_cast<int>(weights.size());
  if (k < 1 || k > n) throw InvalidInput("min_subset_sum: k out of range");
  std::vector<int> keys;
  std::vector<Integer> vals;
  for (const auto& [key, v] : weights) {
    keys.push_back(key);
    vals.push_back(v);
  }
  MinSubset best{0, {}};
  bool have = false;
  for (const auto& s : k_subsets(n, k)) {
    Integer sum = 0;
    for (int i : s) sum += vals[i];
    if (!have || sum < best.value) {
      best.value = sum;
      best.subset.clear();
      for (int i : s) best.subset.push_back(keys[i]);
      have = true;
    }
  }
  return best;
}

inline Rational unram_normalizer(std::uint64_t p, int h) {
  return make_rational(Integer(p - 1), ipow(p, h) - 1);
}

// Hodge valuation (in units of e) of a height-k subgroup of G[p].
inline Rational hodge_val_unram_p_torsion(const CMTypeLocal& t, int k) {
  if (k < 1 || k >= t.h) throw InvalidInput("hodge_val_unram_p_torsion: need 1 <= k < h");
  return Rational(min_subset_sum(reflex_weights(t), k).value) * unram_normalizer(t.p, t.h);
}

// Devissage sum over the jump set T. The level-j step of the filtration carries
// the factor p^{-(j-1)}, so that n = 1 is the p-torsion value.
inline Rational hodge_val_unram_full(const CMTypeLocal& t, const KernelType& kt) {
  if (static_cast<int>(kt.lambdas.size()) != t.h) throw InvalidInput("hodge_val_unram_full: lambda length must be h");
  const int k = kt.k;
  if (k == 0) return 0;
  const auto w = reflex_weights(t);
  auto lam = [&](int i) { return i >= 1 && i <= t.h ? kt.lambdas[i - 1] : 0; };
  const Rational norm = unram_normalizer(t.p, t.h);
  Rational total = 0;
  for (int i = 0; i < k; ++i) {
    const int hi = lam(k - i), lo = lam(k - i + 1);
    if (hi - lo <= 0) continue;
    int di = 0;
    for (int j = 1; j <= t.h; ++j)
      if (lam(j) == hi) di = j;
    const Rational m = Rational(min_subset_sum(w, di).value) * norm;
    for (int j = lo + 1; j <= hi; ++j) total += m * inv_pow(t.p, j - 1);
  }
  return total;
}

// All kernel types of level n and p-height k in rank h.
inline std::vector<KernelType> kernel_types(int h, int n, int k) {
  std::vector<KernelType> out;
  if (n < 1 || k < 1 || k >= h) return out;
  std::vector<int> lam(h, 0);
  lam[0] = n;
  // positions 1..k-1 range over [1, previous]
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      out.push_back(make_kernel_type(lam));
      return;
    }
    for (int v = 1; v <= lam[pos - 1]; ++v) {
      lam[pos] = v;
      self(self, pos + 1);
    }
    lam[pos] = 0;
  };
  rec(rec, 1);
  return out;
}

inline std::vector<CMTypeLocal> all_cm_types(std::uint64_t p, int h, int size) {
  std::vector<CMTypeLocal> out;
  for (const auto& s : k_subsets(h, size)) {
    std::set<int> phi;
    for (int i : s) phi.insert(i + 1);
    out.push_back(make_cm_type(p, h, phi));
  }
  return out;
}

// Upper bound for the Hodge coefficient. With delta = h/(h-d) integral this is
// ((p-1)/(p^delta-1)) * G(k) * G(n), G(m) = (1-p^{-m})/(1-p^{-1}); otherwise the
// supremum over all CM types of size h-d and kernel types, by enumeration.
inline Rational unram_bound(std::uint64_t p, int h, int d, int k, int n) {
  if (!is_prime(p)) throw InvalidInput("unram_bound: p must be prime");
  if (d < 1 || d >= h) throw InvalidInput("unram_bound: need 1 <= d < h");
  if (k < 1 || k >= h) throw InvalidInput("unram_bound: need 1 <= k < h");
  if (n <= 0) return 0;
  const int size = h - d;
  if (h % size == 0) {
    const unsigned long delta = static_cast<unsigned long>(h / size);
    return make_rational(Integer(p - 1), ipow(p, delta) - 1) * geometric_ratio(p, k) * geometric_ratio(p, n);
  }
  Rational best = 0;
  for (const auto& t : all_cm_types(p, h, size))
    for (const auto& kt : kernel_types(h, n, k)) best = std::max(best, hodge_val_unram_full(t, kt));
  return best;
}

}  // namespace kisin
