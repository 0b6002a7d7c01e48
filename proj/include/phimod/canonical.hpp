#pragma once

// Canonical forms over F_q[[u]]: Smith form (Cartan type) and the Hermite
// form of lattices.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phimod/errors.hpp"
#include "phimod/matrix.hpp"

namespace phimod {

/// Dominant integer vector nu_1 >= ... >= nu_d.
class Coweight {
 public:
  Coweight() = default;
  explicit Coweight(std::vector<Exp> components) : v_(std::move(components)) {
    std::sort(v_.begin(), v_.end(), std::greater<>());
  }

  /// "1,0" or "(1,0)".
  static Coweight parse(const std::string& text) {
    std::vector<Exp> out;
    std::string cleaned;
    for (char c : text)
      if (c != '(' && c != ')' && c != ' ') cleaned += c;
    std::stringstream ss(cleaned);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoll(item, &used));
        if (used != item.size()) throw ParseError("bad coweight component '" + item + "'");
      } catch (const std::logic_error&) {
        throw ParseError("bad coweight component '" + item + "'");
      }
    }
    if (out.empty()) throw ParseError("empty coweight");
    return Coweight(std::move(out));
  }

  const std::vector<Exp>& components() const noexcept { return v_; }
  std::size_t size() const noexcept { return v_.size(); }
  Exp operator[](std::size_t i) const { return v_.at(i); }
  Exp total() const noexcept { return std::accumulate(v_.begin(), v_.end(), Exp{0}); }

  /// (-nu_d, ..., -nu_1).
  Coweight dual() const {
    std::vector<Exp> w;
    for (auto it = v_.rbegin(); it != v_.rend(); ++it) w.push_back(-*it);
    return Coweight(std::move(w));
  }

  /// Largest absolute value of a component.
  Exp max_abs() const noexcept {
    Exp m = 0;
    for (Exp x : v_) m = std::max(m, x < 0 ? -x : x);
    return m;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < v_.size(); ++i) s += (i ? "," : "") + std::to_string(v_[i]);
    return s + ")";
  }

  friend bool operator==(const Coweight&, const Coweight&) = default;
  friend auto operator<=>(const Coweight&, const Coweight&) = default;

 private:
  std::vector<Exp> v_;
};

/// Prefix sums of a bounded by those of b, equal totals.
inline bool dominance_leq(const Coweight& a, const Coweight& b) {
  if (a.size() != b.size()) throw ValidationError("coweights of different length");
  Exp sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (i + 1 < a.size() && sa > sb) return false;
  }
  return sa == sb;
}

namespace detail {

// Truncated power series mod u^K as plain coefficient vectors.
using Trunc = std::vector<Elem>;

inline Exp trunc_val(const Trunc& a) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k]) return static_cast<Exp>(k);
  return static_cast<Exp>(a.size());
}

inline Trunc trunc_mul(const FieldSpec& f, const Trunc& a, const Trunc& b) {
  const std::size_t K = a.size();
  Trunc out(K, 0);
  for (std::size_t i = 0; i < K; ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; i + j < K; ++j)
      if (b[j]) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
  }
  return out;
}

inline Trunc trunc_shift_down(const Trunc& a, std::size_t v) {
  Trunc out(a.size(), 0);
  for (std::size_t k = v; k < a.size(); ++k) out[k - v] = a[k];
  return out;
}

inline Trunc trunc_inv(const FieldSpec& f, const Trunc& a) {
  const std::size_t K = a.size();
  Trunc b(K, 0);
  const Elem lead_inv = f.inv(a[0]);
  b[0] = lead_inv;
  for (std::size_t k = 1; k < K; ++k) {
    Elem acc = 0;
    for (std::size_t j = 1; j <= k; ++j)
      if (a[j] && b[k - j]) acc = f.add(acc, f.mul(a[j], b[k - j]));
    b[k] = f.neg(f.mul(lead_inv, acc));
  }
  return b;
}

inline void trunc_axpy(const FieldSpec& f, Trunc& y, const Trunc& x, const Trunc& c) {
  const Trunc prod = trunc_mul(f, x, c);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = f.sub(y[k], prod[k]);
}

}  // namespace detail

/// The dominant nu with B in GL_d(F_q[[u]]) u^nu GL_d(F_q[[u]]).
inline Coweight cartan_type(const SeriesMatrix& B) {
  const FieldSpec& f = B.field();
  const int d = B.d();
  const Exp c0 = B.val_bound();
  if (c0 >= kExact) throw Singular();
  const SeriesMatrix Bi = B.shifted(-c0);
  const LaurentSeries dt = det(Bi);
  if (dt.is_exact_zero()) throw Singular();
  const Exp D = dt.val();
  const Exp K = D + 1;
  std::vector<detail::Trunc> m(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const LaurentSeries& x = Bi(i, j);
      if (x.prec() < K)
        throw InsufficientPrecision("entry (" + std::to_string(i) + "," + std::to_string(j) + ") known only to O(u^" +
                                    std::to_string(x.prec() + c0) + "), Smith form needs O(u^" + std::to_string(K + c0) + ")");
      detail::Trunc t(static_cast<std::size_t>(K), 0);
      for (Exp k = std::max<Exp>(0, x.start()); k < std::min(K, x.end()); ++k) t[static_cast<std::size_t>(k)] = x.coeff(k);
      m[static_cast<std::size_t>(i * d + j)] = std::move(t);
    }
  auto at = [&](int i, int j) -> detail::Trunc& { return m[static_cast<std::size_t>(i * d + j)]; };
  std::vector<Exp> nu;
  for (int t = 0; t < d; ++t) {
    int pi = -1, pj = -1;
    Exp best = K;
    for (int i = t; i < d; ++i)
      for (int j = t; j < d; ++j) {
        const Exp v = detail::trunc_val(at(i, j));
        if (v < best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) throw InsufficientPrecision("Smith pivot undecidable at O(u^" + std::to_string(K + c0) + ")");
    if (pi != t)
      for (int j = 0; j < d; ++j) std::swap(at(t, j), at(pi, j));
    if (pj != t)
      for (int i = 0; i < d; ++i) std::swap(at(i, t), at(i, pj));
    const auto v = static_cast<std::size_t>(best);
    const detail::Trunc uinv = detail::trunc_inv(f, detail::trunc_shift_down(at(t, t), v));
    for (int i = t + 1; i < d; ++i) {
      if (detail::trunc_val(at(i, t)) >= K) continue;
      const detail::Trunc x = detail::trunc_mul(f, detail::trunc_shift_down(at(i, t), v), uinv);
      for (int j = t; j < d; ++j) detail::trunc_axpy(f, at(i, j), at(t, j), x);
    }
    for (int j = t + 1; j < d; ++j) {
      if (detail::trunc_val(at(t, j)) >= K) continue;
      const detail::Trunc y = detail::trunc_mul(f, detail::trunc_shift_down(at(t, j), v), uinv);
      for (int i = t; i < d; ++i) detail::trunc_axpy(f, at(i, j), at(i, t), y);
    }
    nu.push_back(best + c0);
  }
  return Coweight(std::move(nu));
}

/// A full-rank F_q[[u]]-lattice, stored by its Hermite basis (columns):
/// upper triangular, diagonal u^{a_i}, entry (i,j), j > i, a Laurent
/// polynomial with exponents below a_i.
class Lattice {
 public:
  /// The standard lattice F_q[[u]]^d.
  static Lattice standard(const FieldSpec& f, int d) {
    return Lattice(SeriesMatrix::identity(f, d), std::vector<Exp>(static_cast<std::size_t>(d), 0));
  }

  const SeriesMatrix& basis() const noexcept { return basis_; }
  const std::vector<Exp>& diagonal() const noexcept { return a_; }
  int d() const noexcept { return basis_.d(); }
  const FieldSpec& field() const noexcept { return basis_.field(); }
  Exp detval() const noexcept { return std::accumulate(a_.begin(), a_.end(), Exp{0}); }

  /// Exact inverse of the basis matrix.
  SeriesMatrix inverse_basis() const {
    const FieldSpec& f = field();
    const int d = this->d();
    SeriesMatrix x(f, d);
    for (int i = d - 1; i >= 0; --i) {
      x(i, i) = LaurentSeries::monomial(f, 1, -a_[i]);
      for (int j = i + 1; j < d; ++j) {
        LaurentSeries acc(f);
        for (int k = i + 1; k <= j; ++k) acc += basis_(i, k) * x(k, j);
        x(i, j) = -(acc.shifted(-a_[i]));
      }
    }
    return x;
  }

  /// Membership of a vector of F_q((u))^d.
  bool contains(const std::vector<LaurentSeries>& v) const {
    const std::vector<LaurentSeries> c = inverse_basis() * v;
    for (const auto& x : c) {
      if (!x.is_zero() && x.start() < 0) return false;
      if (x.prec() < 0) throw InsufficientPrecision("membership undecidable at current precision");
    }
    return true;
  }

  bool contains_lattice(const Lattice& other) const {
    for (int j = 0; j < d(); ++j)
      if (!contains(other.basis_.column(j))) return false;
    return true;
  }

  /// u^k L.
  Lattice scaled(Exp k) const {
    std::vector<Exp> a = a_;
    for (auto& x : a) x += k;
    return Lattice(basis_.shifted(k), std::move(a));
  }

  /// Total order key: det valuation, diagonal, then off-diagonal coefficients.
  std::vector<std::int64_t> signature() const {
    std::vector<std::int64_t> s{detval()};
    s.insert(s.end(), a_.begin(), a_.end());
    for (int i = 0; i < d(); ++i)
      for (int j = i + 1; j < d(); ++j) {
        const LaurentSeries& x = basis_(i, j);
        s.push_back(static_cast<std::int64_t>(x.coeffs().size()));
        s.push_back(x.is_zero() ? 0 : x.start());
        for (Elem c : x.coeffs()) s.push_back(c);
      }
    return s;
  }

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.a_ == b.a_ && a.basis_ == b.basis_; }
  friend bool operator<(const Lattice& a, const Lattice& b) { return a.signature() < b.signature(); }

  /// Build from an already reduced Hermite basis (no checks beyond shape).
  static Lattice from_hermite(SeriesMatrix basis, std::vector<Exp> diagonal) {
    return Lattice(std::move(basis), std::move(diagonal));
  }

 private:
  Lattice(SeriesMatrix basis, std::vector<Exp> a) : basis_(std::move(basis)), a_(std::move(a)) {}

  SeriesMatrix basis_;
  std::vector<Exp> a_;
};

/// Canonical Hermite basis of the lattice spanned by the columns of `gens`.
/// `prec` is the working precision for unit inverses.
inline Lattice lattice_hnf(const SeriesMatrix& gens, Exp prec = kDefaultPrecision) {
  const FieldSpec& f = gens.field();
  const int d = gens.d();
  SeriesMatrix m = gens;
  std::vector<Exp> a(static_cast<std::size_t>(d), 0);
  auto col_axpy = [&](int dst, int src, const LaurentSeries& c, int rows) {
    for (int k = 0; k < rows; ++k) m(k, dst) -= c * m(k, src);
  };
  for (int i = d - 1; i >= 0; --i) {
    int best = -1;
    Exp best_val = kExact;
    bool undecided = false;
    for (int j = 0; j <= i; ++j) {
      const LaurentSeries& x = m(i, j);
      if (x.is_zero()) {
        if (!x.is_exact()) undecided = true;
        continue;
      }
      if (x.start() < best_val) {
        best_val = x.start();
        best = j;
      }
    }
    if (best < 0) {
      if (undecided) throw InsufficientPrecision("Hermite pivot undecidable at current precision");
      throw Singular("generators do not span a lattice");
    }
    for (int j = 0; j <= i; ++j)
      if (m(i, j).is_zero() && m(i, j).prec() < best_val)
        throw InsufficientPrecision("Hermite pivot undecidable at current precision");
    if (best != i)
      for (int k = 0; k <= i; ++k) std::swap(m(k, best), m(k, i));
    a[static_cast<std::size_t>(i)] = best_val;
    const LaurentSeries uinv = series_inv(m(i, i).shifted(-best_val), prec);
    for (int k = 0; k < i; ++k) m(k, i) = m(k, i) * uinv;
    m(i, i) = LaurentSeries::monomial(f, 1, best_val);
    for (int j = 0; j < i; ++j) {
      const LaurentSeries c = m(i, j).shifted(-best_val);
      if (!c.is_zero()) col_axpy(j, i, c, i);
      m(i, j) = LaurentSeries(f);
    }
  }
  for (int j = 1; j < d; ++j)
    for (int i = j - 1; i >= 0; --i) {
      const LaurentSeries e = m(i, j);
      const Exp ai = a[static_cast<std::size_t>(i)];
      if (e.prec() < ai) throw InsufficientPrecision("Hermite entry not certified below u^" + std::to_string(ai));
      const LaurentSeries c = e.high_part(ai).shifted(-ai);
      m(i, j) = e.low_part(ai);
      if (!c.is_zero()) col_axpy(j, i, c, i);
    }
  return Lattice::from_hermite(std::move(m), std::move(a));
}

/// Relative position of M with respect to L: the Cartan type of g_L^{-1} g_M.
inline Coweight relative_position(const Lattice& L, const Lattice& M) {
  return cartan_type(L.inverse_basis() * M.basis());
}

}  // namespace phimod
