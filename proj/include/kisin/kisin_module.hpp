#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/matrix.hpp"
#include "kisin/rational.hpp"
#include "kisin/series.hpp"

namespace kisin {

// A mod-p Kisin module of rank h given by its Frobenius matrix A in the row
// convention: phi(f_1, ..., f_h) = (sigma(f_1), ..., sigma(f_h)) * A.
class FiniteKisinModule {
 public:
  FiniteKisinModule(SeriesMatrix frobenius, std::int64_t eisenstein_degree)
      : a_(std::move(frobenius)), e_(eisenstein_degree) {
    if (a_.rows() != a_.cols() || a_.rows() < 1) throw InvalidInput("FiniteKisinModule: matrix must be square");
    if (e_ < 1) throw InvalidInput("FiniteKisinModule: Eisenstein degree must be >= 1");
  }

  const FieldSpec& field() const { return a_.field(); }
  int rank() const { return a_.rows(); }
  const SeriesMatrix& frobenius() const { return a_; }
  std::int64_t eisenstein_degree() const { return e_; }
  std::int64_t precision() const { return a_.precision(); }

 private:
  SeriesMatrix a_;
  std::int64_t e_;
};

inline Valuation det_valuation(const FiniteKisinModule& m) {
  const TruncSeries d = determinant(m.frobenius());
  const Valuation v = valuation(d);
  if (v.is_infinite()) throw PrecisionExhausted("det_valuation: determinant vanishes to precision");
  return v;
}

// Lexicographically ordered k-subsets of {0, ..., n-1}.
inline std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// k-th compound matrix; basis e_I for k-subsets I in lexicographic order.
inline FiniteKisinModule wedge_power(const FiniteKisinModule& m, int k) {
  const int h = m.rank();
  if (k < 1 || k > h) throw InvalidInput("wedge_power: k must lie in [1, h]");
  const auto subsets = k_subsets(h, k);
  const int n = static_cast<int>(subsets.size());
  SeriesMatrix w(m.field(), n, n, m.precision());
  for (int I = 0; I < n; ++I)
    for (int J = 0; J < n; ++J) w(I, J) = determinant(m.frobenius().submatrix(subsets[I], subsets[J]));
  return FiniteKisinModule(std::move(w), m.eisenstein_degree());
}

struct QuasiKisinBlock {
  FieldSpec field;
  SeriesMatrix block_frobenius;  // under the q-Frobenius
  int isotypic_index;            // tau in {0, ..., f-1}
  std::vector<int> basis;        // indices into the parent basis
};

// Composes phi f times (q = p^f) and splits the result into diagonal blocks.
// Basis vectors are assigned isotypic classes by following the nonzero pattern of A,
// which must move class tau to class tau+1 mod f; each class is then split into
// its connected components under the composed matrix.
inline std::vector<QuasiKisinBlock> quasi_kisin_decompose(const FiniteKisinModule& m) {
  const FieldSpec& F = m.field();
  const int f = F.f();
  const int h = m.rank();
  const SeriesMatrix& A = m.frobenius();

  std::vector<int> cls(h, -1);
  for (int start = 0; start < h; ++start) {
    if (cls[start] >= 0) continue;
    cls[start] = 0;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < h; ++j) {
        const bool fwd = !A(i, j).is_zero();
        const bool bwd = !A(j, i).is_zero();
        if (!fwd && !bwd) continue;
        const int want = fwd ? (cls[i] + 1) % f : (cls[i] - 1 + f) % f;
        if (cls[j] < 0) {
          cls[j] = want;
          stack.push_back(j);
        } else if (cls[j] != want) {
          throw InvalidInput("quasi_kisin_decompose: Frobenius does not permute isotypic blocks cyclically");
        }
      }
    }
  }

  // phi^f(x) = sigma^f(x) * sigma^{f-1}(A) * ... * sigma(A) * A
  SeriesMatrix composed = A;
  for (int t = 1; t < f; ++t) composed = A.sigma(t) * composed;

  std::vector<int> comp(h, -1);
  int ncomp = 0;
  for (int start = 0; start < h; ++start) {
    if (comp[start] >= 0) continue;
    comp[start] = ncomp;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < h; ++j) {
        if (comp[j] >= 0) continue;
        if (composed(i, j).is_zero() && composed(j, i).is_zero()) continue;
        if (cls[j] != cls[i])
          throw InvalidInput("quasi_kisin_decompose: composed Frobenius mixes isotypic classes");
        comp[j] = ncomp;
        stack.push_back(j);
      }
    }
    ++ncomp;
  }

  std::vector<QuasiKisinBlock> blocks;
  Valuation total(0);
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> idx;
    for (int i = 0; i < h; ++i)
      if (comp[i] == c) idx.push_back(i);
    SeriesMatrix b = composed.submatrix(idx, idx);
    total = total + valuation(determinant(b));
    blocks.push_back(QuasiKisinBlock{F, std::move(b), cls[idx.front()], idx});
  }

  // v_u(det phi) = (p-1)/(p^f-1) * sum of block valuations.
  if (total.is_infinite()) throw PrecisionExhausted("quasi_kisin_decompose: block determinant vanishes");
  const Rational lhs(det_valuation(m).value());
  const Rational rhs = make_rational(Integer(F.p() - 1), ipow(F.p(), f) - 1) * Rational(total.value());
  if (lhs != rhs) throw ConsistencyError("quasi_kisin_decompose: valuation identity failed");
  return blocks;
}

inline Valuation serre_tensor_valuation(Valuation v, int rho) {
  if (v.is_infinite()) throw InvalidInput("serre_tensor_valuation: valuation must be finite");
  if (rho < 1) throw InvalidInput("serre_tensor_valuation: rho must be >= 1");
  return Valuation(v.value() * rho);
}

inline Rational serre_tensor_valuation(const Rational& v, int rho) {
  if (rho < 1) throw InvalidInput("serre_tensor_valuation: rho must be >= 1");
  return v * rho;
}

}  // namespace kisin
