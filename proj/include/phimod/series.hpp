#pragma once

// Truncated Laurent series over F_q with explicit precision.
//
// A series stores the coefficients of u^start .. u^(start+n-1) and a precision
// `prec`: every coefficient of an exponent below prec is certified (those not
// stored are zero) and nothing is known at or beyond prec. prec == kExact
// marks a Laurent polynomial known exactly.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "phimod/errors.hpp"
#include "phimod/field.hpp"

namespace phimod {

using Exp = std::int64_t;

inline constexpr Exp kExact = Exp{1} << 60;
inline constexpr Exp kDefaultPrecision = 64;

inline Exp clamp_prec(Exp v) noexcept { return v >= kExact ? kExact : v; }

enum class Tri { Equal, Unequal, Unknown };

class LaurentSeries {
 public:
  /// The exact zero of F_q((u)).
  explicit LaurentSeries(FieldSpec field) : field_(std::move(field)) {}

  static LaurentSeries zero(const FieldSpec& f, Exp prec = kExact) {
    LaurentSeries s(f);
    s.prec_ = clamp_prec(prec);
    return s;
  }

  static LaurentSeries monomial(const FieldSpec& f, Elem c, Exp k, Exp prec = kExact) {
    return from_coeffs(f, k, {c}, prec);
  }

  static LaurentSeries constant(const FieldSpec& f, Elem c) { return monomial(f, c, 0); }
  static LaurentSeries one(const FieldSpec& f) { return constant(f, 1); }

  /// Coefficients of u^start, u^(start+1), ...; entries at exponents >= prec are dropped.
  static LaurentSeries from_coeffs(const FieldSpec& f, Exp start, std::vector<Elem> coeffs, Exp prec = kExact) {
    LaurentSeries s(f);
    s.start_ = start;
    s.c_ = std::move(coeffs);
    s.prec_ = clamp_prec(prec);
    s.normalize();
    return s;
  }

  const FieldSpec& field() const noexcept { return field_; }
  Exp prec() const noexcept { return prec_; }
  bool is_exact() const noexcept { return prec_ >= kExact; }

  /// No nonzero coefficient is known (exact zero or zero to precision).
  bool is_zero() const noexcept { return c_.empty(); }
  bool is_exact_zero() const noexcept { return c_.empty() && is_exact(); }

  /// u-adic valuation. Throws when the series is zero to its precision.
  Exp val() const {
    if (is_zero()) {
      if (is_exact()) throw DivisionByZero("valuation of zero");
      throw InsufficientPrecision("valuation undecidable: series is zero to O(u^" + std::to_string(prec_) + ")");
    }
    return start_;
  }

  /// A certified lower bound for the valuation (kExact for the exact zero).
  Exp val_bound() const noexcept { return is_zero() ? prec_ : start_; }

  Exp start() const noexcept { return start_; }
  /// One past the largest stored exponent.
  Exp end() const noexcept { return start_ + static_cast<Exp>(c_.size()); }
  const std::vector<Elem>& coeffs() const noexcept { return c_; }

  Elem coeff(Exp k) const {
    if (k >= prec_) throw InsufficientPrecision("coefficient of u^" + std::to_string(k) + " is not certified");
    if (k < start_ || k >= end()) return 0;
    return c_[static_cast<std::size_t>(k - start_)];
  }

  Elem leading() const {
    (void)val();
    return c_.front();
  }

  /// Forget everything at or beyond `prec`.
  LaurentSeries truncated(Exp prec) const {
    if (prec >= prec_) return *this;
    LaurentSeries s(*this);
    s.prec_ = prec;
    s.normalize();
    return s;
  }

  /// The exact Laurent polynomial made of the terms below u^k (requires k <= prec).
  LaurentSeries low_part(Exp k) const {
    if (k > prec_) throw InsufficientPrecision("terms below u^" + std::to_string(k) + " are not all certified");
    LaurentSeries s(*this);
    s.prec_ = kExact;
    if (k < s.end()) {
      if (k <= s.start_) {
        s.c_.clear();
      } else {
        s.c_.resize(static_cast<std::size_t>(k - s.start_));
      }
    }
    s.normalize();
    return s;
  }

  /// The terms at or above u^k, same precision.
  LaurentSeries high_part(Exp k) const {
    LaurentSeries s(*this);
    if (k > s.start_) {
      if (k >= s.end()) {
        s.c_.clear();
      } else {
        s.c_.erase(s.c_.begin(), s.c_.begin() + static_cast<std::ptrdiff_t>(k - s.start_));
        s.start_ = k;
      }
    }
    s.normalize();
    return s;
  }

  /// Multiplication by u^k.
  LaurentSeries shifted(Exp k) const {
    LaurentSeries s(*this);
    s.start_ += k;
    if (!s.is_exact()) s.prec_ += k;
    return s;
  }

  LaurentSeries scaled(Elem c) const {
    if (c == 0) return zero(field_);
    LaurentSeries s(*this);
    for (auto& x : s.c_) x = field_.mul(x, c);
    return s;
  }

  /// Declare the stored terms to be the whole series.
  LaurentSeries as_exact() const {
    LaurentSeries s(*this);
    s.prec_ = kExact;
    return s;
  }

  LaurentSeries operator-() const {
    LaurentSeries s(*this);
    for (auto& x : s.c_) x = field_.neg(x);
    return s;
  }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return add_impl(a, b, false); }
  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return add_impl(a, b, true); }

  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    if (!(a.field_ == b.field_)) throw FieldMismatch();
    const FieldSpec& f = a.field_;
    const Exp pa = a.is_exact() ? kExact : a.prec_ + b.val_bound();
    const Exp pb = b.is_exact() ? kExact : b.prec_ + a.val_bound();
    const Exp prec = clamp_prec(std::min(pa, pb));
    if (a.is_zero() || b.is_zero()) return zero(f, prec);
    const Exp start = a.start_ + b.start_;
    const std::size_t na = a.c_.size(), nb = b.c_.size();
    std::size_t n = na + nb - 1;
    if (prec < kExact) n = static_cast<std::size_t>(std::clamp<Exp>(prec - start, 0, static_cast<Exp>(n)));
    std::vector<Elem> out(n, 0);
    if (f.r() == 1) {
      const std::uint64_t p = static_cast<std::uint64_t>(f.p());
      std::vector<std::uint64_t> acc(n, 0);
      for (std::size_t i = 0; i < na && i < n; ++i) {
        const std::uint64_t ai = a.c_[i];
        if (ai == 0) continue;
        const std::size_t jmax = std::min(nb, n - i);
        for (std::size_t j = 0; j < jmax; ++j) acc[i + j] += ai * b.c_[j];
        if ((i & 0xFFF) == 0xFFF)
          for (auto& x : acc) x %= p;
      }
      for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<Elem>(acc[k] % p);
    } else {
      for (std::size_t i = 0; i < na && i < n; ++i) {
        if (a.c_[i] == 0) continue;
        const std::size_t jmax = std::min(nb, n - i);
        for (std::size_t j = 0; j < jmax; ++j) out[i + j] = f.add(out[i + j], f.mul(a.c_[i], b.c_[j]));
      }
    }
    return from_coeffs(f, start, std::move(out), prec);
  }

  LaurentSeries& operator+=(const LaurentSeries& o) { return *this = *this + o; }
  LaurentSeries& operator-=(const LaurentSeries& o) { return *this = *this - o; }
  LaurentSeries& operator*=(const LaurentSeries& o) { return *this = *this * o; }

  /// Structural identity: same field, same certified coefficients, same precision.
  friend bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
    return a.field_ == b.field_ && a.prec_ == b.prec_ && a.c_ == b.c_ && (a.c_.empty() || a.start_ == b.start_);
  }

  /// Three-valued equality of the underlying field elements.
  Tri compare(const LaurentSeries& other) const {
    const LaurentSeries d = *this - other;
    if (!d.is_zero()) return Tri::Unequal;
    return d.is_exact() ? Tri::Equal : Tri::Unknown;
  }

  /// True when the two agree on every coefficient below `prec` (both must certify them).
  bool agrees_to(const LaurentSeries& other, Exp prec) const {
    const LaurentSeries d = *this - other;
    if (d.prec() < prec) return false;
    return d.is_zero() || d.start_ >= prec;
  }

 private:
  static LaurentSeries add_impl(const LaurentSeries& a, const LaurentSeries& b, bool subtract) {
    if (!(a.field_ == b.field_)) throw FieldMismatch();
    const FieldSpec& f = a.field_;
    const Exp prec = std::min(a.prec_, b.prec_);
    if (b.is_zero()) return a.truncated(prec);
    if (a.is_zero()) return (subtract ? -b : b).truncated(prec);
    const Exp lo = std::min(a.start_, b.start_);
    Exp hi = std::max(a.end(), b.end());
    if (prec < kExact) hi = std::min(hi, prec);
    if (hi <= lo) return zero(f, prec);
    std::vector<Elem> out(static_cast<std::size_t>(hi - lo), 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      const Exp k = a.start_ + static_cast<Exp>(i);
      if (k >= hi) break;
      out[static_cast<std::size_t>(k - lo)] = a.c_[i];
    }
    for (std::size_t i = 0; i < b.c_.size(); ++i) {
      const Exp k = b.start_ + static_cast<Exp>(i);
      if (k >= hi) break;
      Elem& slot = out[static_cast<std::size_t>(k - lo)];
      slot = subtract ? f.sub(slot, b.c_[i]) : f.add(slot, b.c_[i]);
    }
    return from_coeffs(f, lo, std::move(out), prec);
  }

  void normalize() {
    if (prec_ < kExact && end() > prec_) {
      if (start_ >= prec_) {
        c_.clear();
      } else {
        c_.resize(static_cast<std::size_t>(prec_ - start_));
      }
    }
    std::size_t lead = 0;
    while (lead < c_.size() && c_[lead] == 0) ++lead;
    if (lead == c_.size()) {
      c_.clear();
      start_ = 0;
      return;
    }
    if (lead > 0) {
      c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
      start_ += static_cast<Exp>(lead);
    }
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  FieldSpec field_;
  Exp start_ = 0;
  std::vector<Elem> c_;
  Exp prec_ = kExact;
};

/// Inverse in F_q((u)), certified to absolute precision min(prec, a.prec - 2 val(a)).
/// Exact monomials invert exactly.
inline LaurentSeries series_inv(const LaurentSeries& a, Exp prec = kDefaultPrecision) {
  const FieldSpec& f = a.field();
  if (a.is_zero()) {
    if (a.is_exact()) throw DivisionByZero();
    throw InsufficientPrecision("leading term unknown: series is zero to O(u^" + std::to_string(a.prec()) + ")");
  }
  const Exp v = a.start();
  const Elem lead_inv = f.inv(a.coeffs().front());
  if (a.is_exact() && a.coeffs().size() == 1) return LaurentSeries::monomial(f, lead_inv, -v);
  Exp out_prec = a.is_exact() ? prec : std::min(prec, a.prec() - 2 * v);
  out_prec = std::max(out_prec, -v + 1);
  const std::size_t n = static_cast<std::size_t>(out_prec + v);
  const auto& ac = a.coeffs();
  std::vector<Elem> b(n, 0);
  b[0] = lead_inv;
  for (std::size_t k = 1; k < n; ++k) {
    Elem acc = 0;
    const std::size_t jmax = std::min(k, ac.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc = f.add(acc, f.mul(ac[j], b[k - j]));
    b[k] = f.neg(f.mul(lead_inv, acc));
  }
  return LaurentSeries::from_coeffs(f, -v, std::move(b), out_prec);
}

/// The semilinear Frobenius: u^i -> u^{p i}, coefficients fixed or raised to the p-th power.
inline LaurentSeries apply_phi(const LaurentSeries& a) {
  const FieldSpec& f = a.field();
  const Exp p = f.p();
  const Exp prec = a.is_exact() ? kExact : a.prec() * p;
  if (a.is_zero()) return LaurentSeries::zero(f, prec);
  const auto& ac = a.coeffs();
  std::vector<Elem> out((ac.size() - 1) * static_cast<std::size_t>(p) + 1, 0);
  for (std::size_t i = 0; i < ac.size(); ++i) out[i * static_cast<std::size_t>(p)] = f.phi(ac[i]);
  return LaurentSeries::from_coeffs(f, a.start() * p, std::move(out), prec);
}

}  // namespace phimod
