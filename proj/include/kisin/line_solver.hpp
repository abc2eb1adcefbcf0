#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "kisin/errors.hpp"
#include "kisin/kisin_module.hpp"
#include "kisin/series.hpp"

namespace kisin {

// A saturated phi-stable line: (sigma(f_1), ..., sigma(f_h)) A = c u^mu (f_1, ..., f_h), c a unit.
struct EigenLine {
  Valuation mu;
  std::vector<TruncSeries> generator;  // the pivot coordinate equals 1
  int pivot;                           // first coordinate that is a unit
  int first_nonzero;                   // first coordinate that is nonzero
  std::int64_t first_valuation;        // its valuation
};

struct SolverOptions {
  std::int64_t witness_precision = 0;  // 0: as much as the module precision allows
  bool verify = true;                  // re-substitute every witness
  unsigned threads = 0;                // 0: hardware concurrency
  // Optional filter on normalized witnesses. When set, every saturating parameter
  // point of a candidate is tried until one is accepted.
  std::function<bool(const std::vector<TruncSeries>&)> accept;
  std::uint64_t max_points = 1u << 16;
};

namespace detail {

// Small linear system over F_p in the free parameters, kept in reduced row echelon
// form. A row r encodes r[0] + sum_t r[t+1] z_t = 0, the same layout as affine values.
class ParamSystem {
 public:
  explicit ParamSystem(std::uint32_t p) : p_(p) {}

  int add_param() { return nparams_++; }
  int nparams() const { return nparams_; }

  // Returns false if the new equation is inconsistent with the previous ones.
  bool add(std::vector<std::uint32_t> row) {
    reduce(row);
    int lead = -1;
    for (int t = 1; t <= nparams_; ++t)
      if (row[t]) {
        lead = t;
        break;
      }
    if (lead < 0) return row[0] == 0;
    const std::uint64_t inv = inv_mod(row[lead], p_);
    for (auto& x : row) x = static_cast<std::uint32_t>(x * inv % p_);
    for (auto& r : rows_) {
      r.resize(nparams_ + 1, 0);
      if (r[lead]) {
        const std::uint64_t c = r[lead];
        for (int t = 0; t <= nparams_; ++t) r[t] = static_cast<std::uint32_t>((r[t] + (p_ - c) * row[t]) % p_);
      }
    }
    rows_.push_back(std::move(row));
    pivots_.push_back(lead);
    return true;
  }

  // Eliminates pivot parameters, leaving a function of the free parameters.
  void reduce(std::vector<std::uint32_t>& row) const {
    row.resize(nparams_ + 1, 0);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const int piv = pivots_[k];
      if (!row[piv]) continue;
      const std::uint64_t c = row[piv];
      const auto& r = rows_[k];
      for (std::size_t t = 0; t < r.size(); ++t) row[t] = static_cast<std::uint32_t>((row[t] + (p_ - c) * r[t]) % p_);
    }
  }

  bool is_pivot(int t) const { return std::find(pivots_.begin(), pivots_.end(), t + 1) != pivots_.end(); }

  // Completes an assignment of the free parameters to a solution.
  std::vector<std::uint32_t> solve(std::vector<std::uint32_t> z) const {
    z.resize(nparams_, 0);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto& r = rows_[k];
      std::uint64_t s = r[0];
      for (std::size_t t = 1; t < r.size(); ++t)
        if (static_cast<int>(t) != pivots_[k] && !is_pivot(static_cast<int>(t) - 1))
          s = (s + std::uint64_t(r[t]) * z[t - 1]) % p_;
      z[pivots_[k] - 1] = static_cast<std::uint32_t>((p_ - s) % p_);
    }
    return z;
  }

 private:
  std::uint32_t p_;
  int nparams_ = 0;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<int> pivots_;
};

using Terms = std::vector<std::pair<std::int64_t, Elem>>;

// Solver for one candidate (first nonzero coordinate i0, f_{i0} = u^s exactly).
// Unknown coefficients are affine in F_p-valued free parameters; x^p acts on the
// parameter part componentwise because z^p = z on F_p.
class LineSearch {
 public:
  LineSearch(const FieldSpec& F, const std::vector<std::vector<Terms>>& A,
             const std::vector<std::vector<std::vector<Terms>>>& buckets, const std::vector<std::int64_t>& alpha,
             std::int64_t precision, int i0, std::int64_t s)
      : F_(F), A_(A), buckets_(buckets), alpha_(alpha), N_(precision), h_(static_cast<int>(A.size())),
        p_(F.p()), i0_(i0), s_(s), sys_(F.p()), stride_(h_ - i0) {
    mu_ = alpha_[i0] + s * static_cast<std::int64_t>(p_ - 1);
    for (auto [a, c] : A_[i0][i0]) g_.emplace_back(a + s * static_cast<std::int64_t>(p_ - 1), c);
    g_lead_ = g_.front().second;
    cols_.resize(h_);
    for (int j = i0 + 1; j < h_; ++j) {
      Column& c = cols_[j];
      c.alpha = alpha_[j];
      c.a_lead = A_[j][j].front().second;
      // x_b first appears at degree min(alpha + p b, mu + b); b* = (mu - alpha)/(p-1)
      const std::int64_t num = mu_ - c.alpha, den = p_ - 1;
      const std::int64_t ceil_bstar = num <= 0 ? 0 : (num + den - 1) / den;
      c.horizon = mu_ + ceil_bstar;
    }
  }

  std::int64_t mu() const { return mu_; }

  // Runs every consistency check; true iff a saturated solution exists.
  bool feasible() {
    try {
      for (int j = i0_ + 1; j < h_; ++j)
        while (cols_[j].next_degree <= cols_[j].horizon) process(j);
      for (int j = i0_ + 1; j < h_; ++j) ensure(j, 0);
    } catch (const Infeasible&) {
      return false;
    }
    if (s_ == 0) {
      point_ = sys_.solve({});
      return true;
    }
    return choose_saturating_point();
  }

  // Generator coefficients up to (exclusive) precision w, at the chosen parameter point.
  std::vector<std::vector<Elem>> witness(std::int64_t w) {
    std::vector<std::vector<Elem>> out(h_);
    for (int j = 0; j < h_; ++j) out[j].assign(w, F_.zero());
    if (s_ < w) out[i0_][s_] = F_.one();
    for (int j = i0_ + 1; j < h_; ++j) {
      ensure(j, w - 1);
      for (std::int64_t b = 0; b < w; ++b) out[j][b] = evaluate(cols_[j], b);
    }
    return out;
  }

  // All parameter points giving a saturated generator, free parameters in
  // lexicographic order. Throws past the limit.
  std::vector<std::vector<std::uint32_t>> saturating_points(std::uint64_t limit) {
    const int np = sys_.nparams();
    std::vector<int> free;
    for (int t = 0; t < np; ++t)
      if (!sys_.is_pivot(t)) free.push_back(t);
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < free.size(); ++k) {
      total *= p_;
      if (total > limit) throw PrecisionExhausted("line solver: too many parameter points");
    }
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> z(np, 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t r = idx;
      for (int k = static_cast<int>(free.size()) - 1; k >= 0; --k) {
        z[free[k]] = static_cast<std::uint32_t>(r % p_);
        r /= p_;
      }
      auto pt = sys_.solve(z);
      point_ = pt;
      bool sat = s_ == 0;
      for (int j = i0_ + 1; j < h_ && !sat; ++j) sat = evaluate(cols_[j], 0).v != 0;
      if (sat) out.push_back(std::move(pt));
    }
    return out;
  }

  void set_point(std::vector<std::uint32_t> z) { point_ = std::move(z); }

  // Largest witness precision that stays inside the module precision.
  std::int64_t max_witness_precision() const {
    std::int64_t w = N_;
    for (int j = i0_ + 1; j < h_; ++j) {
      // coefficient b needs degree min(alpha + p b, mu + b) < N
      w = std::min(w, N_ - mu_);
    }
    return std::max<std::int64_t>(w, 1);
  }

 private:
  struct Infeasible {};

  struct Column {
    std::int64_t alpha = 0;
    Elem a_lead{};
    std::int64_t horizon = 0;
    std::int64_t next_degree = 0;
    std::int64_t known = 0;    // number of determined coefficients
    std::vector<Elem> data;    // coefficient b occupies [b*stride, (b+1)*stride)
  };

  Elem at(const Column& c, std::int64_t b, int t) const { return c.data[b * stride_ + t]; }

  Elem evaluate(const Column& c, std::int64_t b) const {
    Elem v = at(c, b, 0);
    for (int t = 0; t < sys_.nparams(); ++t) {
      if (point_[t] == 0) continue;
      v = F_.add(v, F_.mul(at(c, b, t + 1), F_.from_int(point_[t])));
    }
    return v;
  }

  void ensure(int i, std::int64_t b) {
    if (i == i0_) return;
    while (cols_[i].known <= b) process(i);
  }

  // acc += c * (x_i[b])^{p if frob}
  void accumulate(std::vector<Elem>& acc, Elem c, int i, std::int64_t b, bool frob) {
    if (i == i0_) {
      if (b == s_) acc[0] = F_.add(acc[0], c);
      return;
    }
    const Column& col = cols_[i];
    const int np = sys_.nparams();
    for (int t = 0; t <= np; ++t) {
      Elem x = at(col, b, t);
      if (x.v == 0) continue;
      if (frob) x = F_.frob(x);
      acc[t] = F_.add(acc[t], F_.mul(c, x));
    }
  }

  // F_p-linear functionals: the digits of an F_q-valued affine function.
  void require_zero(const std::vector<Elem>& val) {
    const int np = sys_.nparams();
    const int f = F_.f();
    for (int dgt = 0; dgt < f; ++dgt) {
      std::vector<std::uint32_t> row(np + 1, 0);
      bool any = false;
      for (int t = 0; t <= np; ++t) {
        const std::uint32_t dv = f == 1 ? val[t].v : F_.digits(val[t])[dgt];
        row[t] = dv;
        any = any || dv;
      }
      if (!any) continue;
      if (!sys_.add(row)) throw Infeasible{};
    }
  }

  void process(int j) {
    Column& c = cols_[j];
    const std::int64_t D = c.next_degree++;
    if (D >= N_) throw PrecisionExhausted("line solver: degree " + std::to_string(D) + " reaches precision");
    const std::int64_t P = p_;

    // The single coefficient index that first appears at degree D, if any.
    std::int64_t bnew = -1;
    bool g_role = false, a_role = false;
    if (D >= mu_) {
      const std::int64_t b = D - mu_;
      if (mu_ + b <= c.alpha + P * b) {
        bnew = b;
        g_role = true;
        a_role = (mu_ + b == c.alpha + P * b);
      }
    }
    if (bnew < 0 && D >= c.alpha && (D - c.alpha) % P == 0) {
      const std::int64_t b = (D - c.alpha) / P;
      if (c.alpha + P * b < mu_ + b) {
        bnew = b;
        a_role = true;
      }
    }

    // Right-hand side from earlier coordinates: sum_i sum_a A_ij[a] x_i[(D-a)/p]^p.
    std::vector<Elem> L(stride_, F_.zero());
    for (int i = i0_; i < j; ++i) {
      const auto& bucket = buckets_[i][j][D % P];
      for (auto [a, coef] : bucket) {
        if (a > D) break;
        const std::int64_t b = (D - a) / P;
        ensure(i, b);
        accumulate(L, coef, i, b, true);
      }
    }
    // L := (known part of g x - A_jj x^p) - R
    for (auto& x : L) x = F_.neg(x);
    for (auto [a, coef] : g_) {
      if (a > D) break;
      const std::int64_t b = D - a;
      if (g_role && b == bnew) continue;
      accumulate(L, coef, j, b, false);
    }
    for (auto [a, coef] : A_[j][j]) {
      if (a > D) break;
      if ((D - a) % P) continue;
      const std::int64_t b = (D - a) / P;
      if (a_role && b == bnew) continue;
      accumulate(L, F_.neg(coef), j, b, true);
    }

    if (bnew < 0) {
      require_zero(L);
      return;
    }
    if (bnew != c.known) throw ConsistencyError("line solver: coefficients out of order");
    c.data.resize((bnew + 1) * stride_, F_.zero());
    std::vector<Elem> x(stride_, F_.zero());
    const int np = sys_.nparams();
    if (g_role && !a_role) {
      const Elem inv = F_.inv(g_lead_);
      for (int t = 0; t <= np; ++t) x[t] = F_.neg(F_.mul(L[t], inv));
    } else if (a_role && !g_role) {
      // -a x^p + L = 0
      const Elem inv = F_.inv(c.a_lead);
      for (int t = 0; t <= np; ++t) x[t] = F_.frob_inv(F_.mul(L[t], inv));
    } else {
      solve_artin_schreier(c.a_lead, L, x);
    }
    for (int t = 0; t < stride_; ++t) c.data[bnew * stride_ + t] = x[t];
    ++c.known;
  }

  // g x - a x^p = -L over F_q, an F_p-linear equation in x.
  void solve_artin_schreier(Elem a, const std::vector<Elem>& L, std::vector<Elem>& x) {
    const Elem g = g_lead_;
    const int f = F_.f();
    const std::uint32_t p = p_;
    std::vector<Elem> rhs(stride_);
    for (int t = 0; t < stride_; ++t) rhs[t] = F_.neg(L[t]);
    if (f == 1) {
      const Elem d = F_.sub(g, a);
      if (d.v != 0) {
        const Elem inv = F_.inv(d);
        for (int t = 0; t <= sys_.nparams(); ++t) x[t] = F_.mul(rhs[t], inv);
        return;
      }
      require_zero(rhs);
      const int t = sys_.add_param();
      if (t + 1 >= stride_) throw ConsistencyError("line solver: parameter overflow");
      x[t + 1] = F_.one();
      point_.push_back(0);
      return;
    }
    // Matrix of x -> g x - a x^p on the F_p-basis 1, w, ..., w^{f-1}; column k is the image of basis k.
    std::vector<std::vector<std::uint32_t>> M(f, std::vector<std::uint32_t>(f));
    for (int k = 0; k < f; ++k) {
      std::vector<std::uint32_t> e(f, 0);
      e[k] = 1;
      const Elem b = F_.from_digits(e);
      const auto img = F_.digits(F_.sub(F_.mul(g, b), F_.mul(a, F_.frob(b))));
      for (int r = 0; r < f; ++r) M[r][k] = img[r];
    }
    // Row reduce [M | I] to find a section S (M S r = r on the image), image constraints and the kernel.
    std::vector<std::vector<std::uint32_t>> aug(f, std::vector<std::uint32_t>(2 * f, 0));
    for (int r = 0; r < f; ++r) {
      for (int k = 0; k < f; ++k) aug[r][k] = M[r][k];
      aug[r][f + r] = 1;
    }
    std::vector<int> pivcol;
    int row = 0;
    for (int col = 0; col < f && row < f; ++col) {
      int sel = -1;
      for (int r = row; r < f; ++r)
        if (aug[r][col]) {
          sel = r;
          break;
        }
      if (sel < 0) continue;
      std::swap(aug[sel], aug[row]);
      const std::uint64_t inv = inv_mod(aug[row][col], p);
      for (auto& v : aug[row]) v = static_cast<std::uint32_t>(v * inv % p);
      for (int r = 0; r < f; ++r)
        if (r != row && aug[r][col]) {
          const std::uint64_t cc = aug[r][col];
          for (int k = 0; k < 2 * f; ++k) aug[r][k] = static_cast<std::uint32_t>((aug[r][k] + (p - cc) * aug[row][k]) % p);
        }
      pivcol.push_back(col);
      ++row;
    }
    const int rank = row;
    auto apply_rows = [&](int r, const std::vector<std::uint32_t>& v) {
      std::uint64_t s = 0;
      for (int k = 0; k < f; ++k) s = (s + std::uint64_t(aug[r][f + k]) * v[k]) % p;
      return static_cast<std::uint32_t>(s);
    };
    const int np = sys_.nparams();
    // Image constraints: rows rank..f-1 of the transform annihilate the image.
    for (int r = rank; r < f; ++r) {
      std::vector<std::uint32_t> cons(np + 1, 0);
      bool any = false;
      for (int t = 0; t <= np; ++t) {
        const std::uint32_t v = apply_rows(r, F_.digits(rhs[t]));
        cons[t] = v;
        any = any || v;
      }
      if (any && !sys_.add(cons)) throw Infeasible{};
    }
    // Particular solution: pivot variables from the transformed right-hand side, free variables zero.
    for (int t = 0; t <= np; ++t) {
      const auto rd = F_.digits(rhs[t]);
      std::vector<std::uint32_t> sol(f, 0);
      for (int r = 0; r < rank; ++r) sol[pivcol[r]] = apply_rows(r, rd);
      x[t] = F_.from_digits(sol);
    }
    // Kernel directions become new parameters.
    for (int col = 0; col < f; ++col) {
      if (std::find(pivcol.begin(), pivcol.end(), col) != pivcol.end()) continue;
      std::vector<std::uint32_t> kv(f, 0);
      kv[col] = 1;
      for (int r = 0; r < rank; ++r) kv[pivcol[r]] = static_cast<std::uint32_t>((p - aug[r][col]) % p);
      const int t = sys_.add_param();
      if (t + 1 >= stride_) throw ConsistencyError("line solver: parameter overflow");
      x[t + 1] = F_.from_digits(kv);
      point_.push_back(0);
    }
  }

  // Picks a parameter point with some later coordinate a unit.
  bool choose_saturating_point() {
    const int np = sys_.nparams();
    const int f = F_.f();
    for (int j = i0_ + 1; j < h_; ++j) {
      const Column& c = cols_[j];
      for (int dgt = 0; dgt < f; ++dgt) {
        std::vector<std::uint32_t> row(np + 1, 0);
        for (int t = 0; t <= np; ++t) {
          const Elem v = at(c, 0, t);
          row[t] = f == 1 ? v.v : F_.digits(v)[dgt];
        }
        sys_.reduce(row);
        std::vector<std::uint32_t> z(np, 0);
        int free_t = -1;
        for (int t = 0; t < np; ++t)
          if (row[t + 1] && !sys_.is_pivot(t)) free_t = t;
        if (free_t < 0 && row[0] == 0) continue;
        if (free_t >= 0 && (row[0] + row[free_t + 1]) % p_ != 0) z[free_t] = 1;
        point_ = sys_.solve(z);
        return true;
      }
    }
    return false;
  }

  const FieldSpec& F_;
  const std::vector<std::vector<Terms>>& A_;
  const std::vector<std::vector<std::vector<Terms>>>& buckets_;
  const std::vector<std::int64_t>& alpha_;
  std::int64_t N_;
  int h_;
  std::uint32_t p_;
  int i0_;
  std::int64_t s_;
  std::int64_t mu_ = 0;
  Terms g_;
  Elem g_lead_{};
  ParamSystem sys_;
  int stride_;
  std::vector<Column> cols_;
  std::vector<std::uint32_t> point_;
};

}  // namespace detail

inline bool is_triangular_module(const FiniteKisinModule& m) { return m.frobenius().is_upper_triangular(); }

// Substitutes a generator into phi and checks sigma(f) A = g f modulo u^w for the
// unit-coordinate quotient g; returns v_u(g) on success.
inline std::optional<Valuation> verify_line(const FiniteKisinModule& m, const std::vector<TruncSeries>& f) {
  const int h = m.rank();
  if (static_cast<int>(f.size()) != h) return std::nullopt;
  int piv = -1;
  for (int j = 0; j < h && piv < 0; ++j)
    if (!f[j].is_zero() && f[j].coeff(0).v != 0) piv = j;
  if (piv < 0) return std::nullopt;  // not saturated
  std::int64_t w = f[0].precision();
  for (const auto& x : f) w = std::min(w, x.precision());
  std::vector<TruncSeries> phi(h, TruncSeries(m.field(), w));
  for (int i = 0; i < h; ++i) {
    if (f[i].is_zero()) continue;
    const TruncSeries sf = frobenius_sigma(f[i].with_precision(m.precision()));
    for (int j = 0; j < h; ++j) {
      if (m.frobenius()(i, j).is_zero()) continue;
      phi[j] = phi[j] + (sf * m.frobenius()(i, j)).with_precision(w);
    }
  }
  const TruncSeries g = phi[piv] * f[piv].unit_inverse();
  for (int j = 0; j < h; ++j)
    if (!(phi[j] - g * f[j]).is_zero()) return std::nullopt;
  const Valuation v = valuation(g);
  if (v.is_infinite()) return std::nullopt;
  return v;
}

// All saturated phi-stable lines of a triangular module, one witness per (first
// nonzero coordinate, its valuation); mu ranges over [0, v_u(det A)].
inline std::vector<EigenLine> enumerate_lines(const FiniteKisinModule& m, const SolverOptions& opt = {}) {
  if (!is_triangular_module(m)) throw InvalidInput("enumerate_lines: Frobenius matrix must be upper triangular");
  const FieldSpec& F = m.field();
  const int h = m.rank();
  const std::int64_t N = m.precision();
  const std::int64_t P = F.p();
  const std::int64_t vdet = det_valuation(m).value();

  std::vector<std::vector<detail::Terms>> A(h, std::vector<detail::Terms>(h));
  std::vector<std::vector<std::vector<detail::Terms>>> buckets(
      h, std::vector<std::vector<detail::Terms>>(h, std::vector<detail::Terms>(P)));
  std::vector<std::int64_t> alpha(h);
  for (int i = 0; i < h; ++i)
    for (int j = i; j < h; ++j) {
      A[i][j] = m.frobenius()(i, j).terms();
      for (auto t : A[i][j]) buckets[i][j][t.first % P].push_back(t);
    }
  for (int i = 0; i < h; ++i) alpha[i] = A[i][i].front().first;

  struct Candidate {
    int i0;
    std::int64_t s;
  };
  std::vector<Candidate> cands;
  for (int i0 = 0; i0 < h; ++i0)
    for (std::int64_t s = 0; alpha[i0] + s * (P - 1) <= vdet; ++s) {
      if (i0 == h - 1 && s > 0) break;  // a lone last coordinate is saturated only for s = 0
      cands.push_back({i0, s});
    }

  std::vector<EigenLine> found;
  std::mutex mtx;
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  auto worker = [&] {
    try {
      for (std::size_t k = next++; k < cands.size(); k = next++) {
        const auto [i0, s] = cands[k];
        detail::LineSearch search(F, A, buckets, alpha, N, i0, s);
        if (!search.feasible()) continue;
        // the filter and the check see the full witness; the stored generator may be shorter
        std::int64_t w = search.max_witness_precision();
        const std::int64_t w_out = opt.witness_precision > 0 ? std::min(w, opt.witness_precision) : w;
        if (!opt.accept && !opt.verify) w = w_out;
        auto build = [&](int& piv) {
          const auto coeffs = search.witness(w);
          std::vector<TruncSeries> gen;
          for (const auto& cs : coeffs) gen.push_back(TruncSeries::from_elems(F, cs, w));
          piv = -1;
          for (int j = 0; j < h && piv < 0; ++j)
            if (gen[j].coeff(0).v != 0) piv = j;
          if (piv < 0) throw ConsistencyError("enumerate_lines: witness not saturated");
          const TruncSeries inv = gen[piv].unit_inverse();
          for (auto& x : gen) x = x * inv;
          return gen;
        };
        int piv = -1;
        std::vector<TruncSeries> gen;
        if (!opt.accept) {
          gen = build(piv);
        } else {
          bool ok = false;
          for (auto& pt : search.saturating_points(opt.max_points)) {
            search.set_point(std::move(pt));
            gen = build(piv);
            if ((ok = opt.accept(gen))) break;
          }
          if (!ok) continue;
        }
        if (opt.verify) {
          const auto v = verify_line(m, gen);
          if (!v || v->value() != search.mu()) throw ConsistencyError("enumerate_lines: witness failed re-substitution");
        }
        if (w_out < w)
          for (auto& x : gen) x = x.with_precision(w_out);
        EigenLine line{Valuation(search.mu()), std::move(gen), piv, i0, s};
        std::lock_guard lock(mtx);
        found.push_back(std::move(line));
      }
    } catch (...) {
      std::lock_guard lock(mtx);
      if (!err) err = std::current_exception();
      next = cands.size();
    }
  };
  unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, static_cast<unsigned>(std::max<std::size_t>(1, cands.size())));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  std::sort(found.begin(), found.end(), [](const EigenLine& a, const EigenLine& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.first_nonzero != b.first_nonzero) return a.first_nonzero < b.first_nonzero;
    return a.first_valuation < b.first_valuation;
  });
  return found;
}

inline std::set<std::int64_t> mu_set(const std::vector<EigenLine>& lines) {
  std::set<std::int64_t> s;
  for (const auto& l : lines) s.insert(l.mu.value());
  return s;
}

// Plucker relations for a vector in the r-th exterior power of a rank-n module
// (lexicographic basis), checked to the common precision of the coordinates.
inline bool is_decomposable(const std::vector<TruncSeries>& x, int n, int r) {
  if (r <= 1 || r >= n - 1) return true;
  const auto subsets = k_subsets(n, r);
  if (x.size() != subsets.size()) throw InvalidInput("is_decomposable: wrong number of coordinates");
  auto index = [&](const std::vector<int>& s) {
    return static_cast<int>(std::lower_bound(subsets.begin(), subsets.end(), s) - subsets.begin());
  };
  // x_{I + j} with sign, for I sorted of size r-1; zero if j in I.
  auto coord = [&](const std::vector<int>& I, int j, int& sign) -> int {
    int greater = 0;
    for (int a : I) {
      if (a == j) return -1;
      if (a > j) ++greater;
    }
    std::vector<int> s = I;
    s.insert(std::upper_bound(s.begin(), s.end(), j), j);
    sign = greater % 2 ? -1 : 1;
    return index(s);
  };
  for (const auto& I : k_subsets(n, r - 1))
    for (const auto& J : k_subsets(n, r + 1)) {
      TruncSeries acc(x.front().field(), x.front().precision());
      for (int l = 0; l <= r; ++l) {
        int sg = 1;
        const int a = coord(I, J[l], sg);
        if (a < 0 || x[a].is_zero()) continue;
        std::vector<int> rest = J;
        rest.erase(rest.begin() + l);
        const TruncSeries& y = x[index(rest)];
        if (y.is_zero()) continue;
        const TruncSeries t = x[a] * y;
        acc = ((l % 2 == 0) == (sg == 1)) ? acc + t : acc - t;
      }
      if (!acc.is_zero()) return false;
    }
  return true;
}

// Valuations of saturated corank-k submodules, via lines in the (h-k)-th exterior
// power; only decomposable lines come from submodules.
inline std::set<std::int64_t> submodule_valuations(const FiniteKisinModule& m, int corank,
                                                   SolverOptions opt = {}) {
  if (corank < 1 || corank >= m.rank()) throw InvalidInput("submodule_valuations: need 1 <= corank < h");
  const int h = m.rank(), r = h - corank;
  if (r >= 2 && r <= h - 2 && !opt.accept)
    opt.accept = [h, r](const std::vector<TruncSeries>& x) { return is_decomposable(x, h, r); };
  return mu_set(enumerate_lines(wedge_power(m, r), opt));
}

// v_u(det phi_M) - mu: the Hodge exponent of the subgroup attached to a line.
inline Valuation hodge_exponent_of_subgroup(const FiniteKisinModule& m, Valuation line_mu) {
  const std::int64_t d = det_valuation(m).value();
  if (line_mu.value() > d) throw ConsistencyError("hodge_exponent_of_subgroup: line valuation exceeds det");
  return Valuation(d - line_mu.value());
}

}  // namespace kisin
