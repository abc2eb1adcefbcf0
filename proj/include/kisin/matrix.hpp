#pragma once

#include <cstdint>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/series.hpp"

namespace kisin {

// Dense square-or-rectangular matrix of truncated series, row-major.
class SeriesMatrix {
 public:
  SeriesMatrix(const FieldSpec& F, int rows, int cols, std::int64_t precision)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, TruncSeries(F, precision)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  TruncSeries& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const TruncSeries& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const FieldSpec& field() const { return a_.front().field(); }

  std::int64_t precision() const {
    std::int64_t n = a_.front().precision();
    for (const auto& s : a_) n = std::min(n, s.precision());
    return n;
  }

  std::int64_t max_degree() const {
    std::int64_t d = 0;
    for (const auto& s : a_) d = std::max(d, degree(s));
    return d;
  }

  bool is_upper_triangular() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < std::min(i, cols_); ++j)
        if (!(*this)(i, j).is_zero()) return false;
    return true;
  }

  SeriesMatrix submatrix(const std::vector<int>& rs, const std::vector<int>& cs) const {
    SeriesMatrix m(field(), static_cast<int>(rs.size()), static_cast<int>(cs.size()), precision());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) m(int(i), int(j)) = (*this)(rs[i], cs[j]);
    return m;
  }

  SeriesMatrix sigma(int times = 1) const {
    SeriesMatrix m = *this;
    for (auto& s : m.a_) s = frobenius_sigma(s, times);
    return m;
  }

  friend SeriesMatrix operator*(const SeriesMatrix& x, const SeriesMatrix& y) {
    if (x.cols_ != y.rows_) throw InvalidInput("SeriesMatrix: dimension mismatch");
    SeriesMatrix r(x.field(), x.rows_, y.cols_, std::min(x.precision(), y.precision()));
    for (int i = 0; i < x.rows_; ++i)
      for (int j = 0; j < y.cols_; ++j) {
        TruncSeries acc(x.field(), r.precision());
        for (int t = 0; t < x.cols_; ++t) {
          if (x(i, t).is_zero() || y(t, j).is_zero()) continue;
          acc = acc + x(i, t) * y(t, j);
        }
        r(i, j) = acc;
      }
    return r;
  }

 private:
  int rows_, cols_;
  std::vector<TruncSeries> a_;
};

namespace detail {

// Cofactor expansion along the first column, skipping zero entries. Division free.
inline TruncSeries det_expand(const SeriesMatrix& m, std::vector<int>& rows, std::vector<int>& cols) {
  const FieldSpec& F = m.field();
  if (cols.empty()) return TruncSeries::monomial(F, F.one(), 0, m.precision());
  const int c = cols.front();
  std::vector<int> rest_cols(cols.begin() + 1, cols.end());
  TruncSeries acc(F, m.precision());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const TruncSeries& x = m(rows[r], c);
    if (x.is_zero()) continue;
    std::vector<int> rest_rows;
    rest_rows.reserve(rows.size() - 1);
    for (std::size_t t = 0; t < rows.size(); ++t)
      if (t != r) rest_rows.push_back(rows[t]);
    TruncSeries minor = det_expand(m, rest_rows, rest_cols);
    if (minor.is_zero()) continue;
    TruncSeries term = x * minor;
    acc = (r % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

// Elimination over the discrete valuation ring F_q[[u]]: pivot on the entry of
// least valuation, so every quotient is integral.
inline TruncSeries det_eliminate(SeriesMatrix m) {
  const FieldSpec& F = m.field();
  const int n = m.rows();
  TruncSeries det = TruncSeries::monomial(F, F.one(), 0, m.precision());
  for (int k = 0; k < n; ++k) {
    int pr = -1, pc = -1;
    Valuation best = Valuation::infinity();
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        Valuation v = valuation(m(i, j));
        if (v < best) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    if (best.is_infinite()) throw PrecisionExhausted("determinant vanishes to the working precision");
    bool flip = false;
    if (pr != k) {
      for (int j = 0; j < n; ++j) std::swap(m(pr, j), m(k, j));
      flip = !flip;
    }
    if (pc != k) {
      for (int i = 0; i < n; ++i) std::swap(m(i, pc), m(i, k));
      flip = !flip;
    }
    const TruncSeries piv = m(k, k);
    det = det * piv;
    if (flip) det = -det;
    const std::int64_t t = best.value();
    const TruncSeries unit_inv = piv.shifted_down(t).unit_inverse();
    for (int i = k + 1; i < n; ++i) {
      if (m(i, k).is_zero()) continue;
      const TruncSeries factor = m(i, k).shifted_down(t) * unit_inv;
      for (int j = k; j < n; ++j) m(i, j) = m(i, j) - factor * m(k, j);
    }
  }
  return det;
}

}  // namespace detail

inline TruncSeries determinant(const SeriesMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("determinant: matrix not square");
  if (m.rows() <= 8) {
    std::vector<int> rows(m.rows()), cols(m.cols());
    for (int i = 0; i < m.rows(); ++i) rows[i] = cols[i] = i;
    return detail::det_expand(m, rows, cols);
  }
  return detail::det_eliminate(m);
}

}  // namespace kisin
