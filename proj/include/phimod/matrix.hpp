#pragma once

// Square matrices over F_q((u)).

#include <algorithm>
#include <string>
#include <vector>

#include "phimod/errors.hpp"
#include "phimod/series.hpp"

namespace phimod {

class SeriesMatrix {
 public:
  SeriesMatrix(const FieldSpec& f, int d) : field_(f), d_(d), e_(static_cast<std::size_t>(d) * d, LaurentSeries(f)) {
    if (d < 1) throw ValidationError("matrix dimension must be >= 1");
  }

  static SeriesMatrix identity(const FieldSpec& f, int d) {
    SeriesMatrix m(f, d);
    for (int i = 0; i < d; ++i) m(i, i) = LaurentSeries::one(f);
    return m;
  }

  /// diag(u^k_0, ..., u^k_{d-1}).
  static SeriesMatrix monomial_diagonal(const FieldSpec& f, const std::vector<Exp>& ks) {
    SeriesMatrix m(f, static_cast<int>(ks.size()));
    for (std::size_t i = 0; i < ks.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = LaurentSeries::monomial(f, 1, ks[i]);
    return m;
  }

  static SeriesMatrix from_rows(const FieldSpec& f, const std::vector<std::vector<LaurentSeries>>& rows) {
    const int d = static_cast<int>(rows.size());
    SeriesMatrix m(f, d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(rows[i].size()) != d) throw ValidationError("matrix must be square");
      for (int j = 0; j < d; ++j) {
        if (!(rows[i][j].field() == f)) throw FieldMismatch();
        m(i, j) = rows[i][j];
      }
    }
    return m;
  }

  const FieldSpec& field() const noexcept { return field_; }
  int d() const noexcept { return d_; }

  LaurentSeries& operator()(int i, int j) { return e_[static_cast<std::size_t>(i * d_ + j)]; }
  const LaurentSeries& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * d_ + j)]; }

  /// Smallest entry precision.
  Exp prec() const noexcept {
    Exp p = kExact;
    for (const auto& x : e_) p = std::min(p, x.prec());
    return p;
  }

  bool is_exact() const noexcept { return prec() >= kExact; }

  /// Lower bound for the valuation of all entries.
  Exp val_bound() const noexcept {
    Exp v = kExact;
    for (const auto& x : e_) v = std::min(v, x.val_bound());
    return v;
  }

  /// The least m >= 0 with every entry in u^{-m} F_q[[u]].
  Exp pole_bound() const noexcept { return std::max<Exp>(0, -val_bound()); }

  SeriesMatrix truncated(Exp prec) const {
    SeriesMatrix m(*this);
    for (auto& x : m.e_) x = x.truncated(prec);
    return m;
  }

  SeriesMatrix shifted(Exp k) const {
    SeriesMatrix m(*this);
    for (auto& x : m.e_) x = x.shifted(k);
    return m;
  }

  SeriesMatrix scaled(const LaurentSeries& c) const {
    SeriesMatrix m(*this);
    for (auto& x : m.e_) x = x * c;
    return m;
  }

  SeriesMatrix transposed() const {
    SeriesMatrix m(field_, d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  std::vector<LaurentSeries> column(int j) const {
    std::vector<LaurentSeries> out;
    for (int i = 0; i < d_; ++i) out.push_back((*this)(i, j));
    return out;
  }

  friend SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) {
    check_compatible(a, b);
    SeriesMatrix m(a);
    for (std::size_t k = 0; k < m.e_.size(); ++k) m.e_[k] = a.e_[k] + b.e_[k];
    return m;
  }

  friend SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) {
    check_compatible(a, b);
    SeriesMatrix m(a);
    for (std::size_t k = 0; k < m.e_.size(); ++k) m.e_[k] = a.e_[k] - b.e_[k];
    return m;
  }

  friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
    check_compatible(a, b);
    const int d = a.d_;
    SeriesMatrix m(a.field_, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        LaurentSeries acc(a.field_);
        for (int k = 0; k < d; ++k) acc += a(i, k) * b(k, j);
        m(i, j) = acc;
      }
    return m;
  }

  friend std::vector<LaurentSeries> operator*(const SeriesMatrix& a, const std::vector<LaurentSeries>& v) {
    if (static_cast<int>(v.size()) != a.d_) throw ValidationError("dimension mismatch");
    std::vector<LaurentSeries> out;
    for (int i = 0; i < a.d_; ++i) {
      LaurentSeries acc(a.field_);
      for (int k = 0; k < a.d_; ++k) acc += a(i, k) * v[k];
      out.push_back(acc);
    }
    return out;
  }

  /// Structural identity (entries and precisions).
  friend bool operator==(const SeriesMatrix& a, const SeriesMatrix& b) {
    return a.d_ == b.d_ && a.field_ == b.field_ && a.e_ == b.e_;
  }

  /// Every entry of a - b vanishes below `prec` (and is certified there).
  bool agrees_to(const SeriesMatrix& other, Exp prec) const {
    check_compatible(*this, other);
    for (std::size_t k = 0; k < e_.size(); ++k)
      if (!e_[k].agrees_to(other.e_[k], prec)) return false;
    return true;
  }

  /// All entries are known to be zero below their precision.
  bool is_zero() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](const LaurentSeries& x) { return x.is_zero(); });
  }

  /// Entry-wise map over the coefficients, for base change.
  template <class Fn>
  SeriesMatrix map_field(const FieldSpec& target, Fn&& embed) const {
    SeriesMatrix m(target, d_);
    for (std::size_t k = 0; k < e_.size(); ++k) {
      std::vector<Elem> cs;
      for (Elem c : e_[k].coeffs()) cs.push_back(embed(c));
      m.e_[k] = LaurentSeries::from_coeffs(target, e_[k].start(), std::move(cs), e_[k].prec());
    }
    return m;
  }

 private:
  static void check_compatible(const SeriesMatrix& a, const SeriesMatrix& b) {
    if (!(a.field_ == b.field_)) throw FieldMismatch();
    if (a.d_ != b.d_) throw ValidationError("dimension mismatch");
  }

  FieldSpec field_;
  int d_;
  std::vector<LaurentSeries> e_;
};

inline SeriesMatrix apply_phi(const SeriesMatrix& a) {
  SeriesMatrix m(a.field(), a.d());
  for (int i = 0; i < a.d(); ++i)
    for (int j = 0; j < a.d(); ++j) m(i, j) = apply_phi(a(i, j));
  return m;
}

namespace detail {

inline LaurentSeries det_rec(const SeriesMatrix& a, std::vector<int>& rows, std::vector<int>& cols) {
  const FieldSpec& f = a.field();
  const std::size_t n = rows.size();
  if (n == 1) return a(rows[0], cols[0]);
  if (n == 2) return a(rows[0], cols[0]) * a(rows[1], cols[1]) - a(rows[0], cols[1]) * a(rows[1], cols[0]);
  LaurentSeries acc(f);
  const int r0 = rows.front();
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<int> sub_cols;
    for (std::size_t c = 0; c < n; ++c)
      if (c != k) sub_cols.push_back(cols[c]);
    const LaurentSeries term = a(r0, cols[k]) * det_rec(a, sub_rows, sub_cols);
    acc = (k % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace detail

/// Determinant by cofactor expansion (d is small).
inline LaurentSeries det(const SeriesMatrix& a) {
  std::vector<int> rows(a.d()), cols(a.d());
  for (int i = 0; i < a.d(); ++i) rows[i] = cols[i] = i;
  return detail::det_rec(a, rows, cols);
}

/// Determinant of the minor with the given rows and columns.
inline LaurentSeries minor_det(const SeriesMatrix& a, std::vector<int> rows, std::vector<int> cols) {
  return detail::det_rec(a, rows, cols);
}

/// Inverse as adjugate / det; `prec` is the absolute target for 1/det.
inline SeriesMatrix mat_inverse(const SeriesMatrix& a, Exp prec = kDefaultPrecision) {
  const FieldSpec& f = a.field();
  const int d = a.d();
  const LaurentSeries dt = det(a);
  if (dt.is_exact_zero()) throw Singular();
  if (dt.is_zero()) throw InsufficientPrecision("determinant vanishes to O(u^" + std::to_string(dt.prec()) + ")");
  const LaurentSeries inv_det = series_inv(dt, prec);
  SeriesMatrix out(f, d);
  if (d == 1) {
    out(0, 0) = inv_det;
    return out;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<int> rows, cols;
      for (int k = 0; k < d; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      LaurentSeries cof = minor_det(a, rows, cols);
      if ((i + j) % 2) cof = -cof;
      out(i, j) = cof * inv_det;
    }
  return out;
}

}  // namespace phimod
