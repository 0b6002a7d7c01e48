#pragma once

// Finite fields F_q, q = p^r, with elements encoded as base-p digit integers.
//
// An element sum_i c_i t^i (c_i in 0..p-1, t a root of the modulus) is stored
// as the integer sum_i c_i p^i. Multiplication goes through exp/log tables
// built from a primitive element, so every operation is O(1) for r = 1 and
// O(r) for addition when r > 1.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "phimod/errors.hpp"

namespace phimod {

using Elem = std::uint32_t;

namespace detail {

inline constexpr Elem kMaxFieldSize = Elem{1} << 20;

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline int mod_p(long long v, int p) {
  long long r = v % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

inline int inv_mod_p(int a, int p) {
  int result = 1, base = mod_p(a, p), e = p - 2;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return result;
}

/// Dense polynomial over F_p, lowest degree first.
using PolyFp = std::vector<int>;

inline void trim(PolyFp& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline PolyFp poly_mul(const PolyFp& a, const PolyFp& b, int p) {
  if (a.empty() || b.empty()) return {};
  PolyFp out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % p;
  trim(out);
  return out;
}

/// Remainder of a modulo m (m nonzero).
inline PolyFp poly_rem(PolyFp a, PolyFp m, int p) {
  trim(a);
  trim(m);
  const int lead_inv = inv_mod_p(m.back(), p);
  while (a.size() >= m.size()) {
    const int factor = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = mod_p(a[shift + i] - factor * m[i], p);
    trim(a);
  }
  return a;
}

/// Trial division by every monic polynomial of degree 1..deg(f)/2.
inline bool is_irreducible(PolyFp f, int p) {
  trim(f);
  const int r = static_cast<int>(f.size()) - 1;
  if (r < 1) return false;
  for (int deg = 1; 2 * deg <= r; ++deg) {
    PolyFp g(deg + 1, 0);
    g[deg] = 1;
    long long count = 1;
    for (int i = 0; i < deg; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
      long long v = idx;
      for (int i = 0; i < deg; ++i) {
        g[i] = static_cast<int>(v % p);
        v /= p;
      }
      if (poly_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

/// First monic irreducible polynomial of degree r in counter order.
inline PolyFp first_irreducible(int p, int r) {
  long long count = 1;
  for (int i = 0; i < r; ++i) count *= p;
  PolyFp f(r + 1, 0);
  f[r] = 1;
  for (long long idx = 0; idx < count; ++idx) {
    long long v = idx;
    for (int i = 0; i < r; ++i) {
      f[i] = static_cast<int>(v % p);
      v /= p;
    }
    if (is_irreducible(f, p)) return f;
  }
  throw ValidationError("no irreducible polynomial found");
}

struct FieldData {
  int p = 2;
  int r = 1;
  Elem q = 2;
  PolyFp modulus;  // monic, degree r; empty when r = 1 and none was supplied
  bool coeff_frobenius = false;
  std::vector<Elem> exp_table;           // exp_table[k] = g^k, k < q - 1
  std::vector<std::uint32_t> log_table;  // log_table[x] for x != 0

  PolyFp to_poly(Elem a) const {
    PolyFp out(r, 0);
    for (int i = 0; i < r; ++i) {
      out[i] = static_cast<int>(a % p);
      a /= p;
    }
    trim(out);
    return out;
  }

  Elem from_poly(const PolyFp& a) const {
    Elem out = 0, scale = 1;
    for (std::size_t i = 0; i < a.size() && i < static_cast<std::size_t>(r); ++i) {
      out += static_cast<Elem>(a[i]) * scale;
      scale *= static_cast<Elem>(p);
    }
    return out;
  }

  Elem mul_slow(Elem a, Elem b) const {
    if (r == 1) return static_cast<Elem>((static_cast<std::uint64_t>(a) * b) % p);
    return from_poly(poly_rem(poly_mul(to_poly(a), to_poly(b), p), modulus, p));
  }

  void build_tables() {
    exp_table.assign(q - 1, 0);
    log_table.assign(q, 0);
    for (Elem g = 1; g < q; ++g) {
      Elem x = 1;
      bool primitive = true;
      for (Elem k = 0; k + 1 < q; ++k) {
        if (k > 0 && x == 1) {
          primitive = false;
          break;
        }
        exp_table[k] = x;
        x = mul_slow(x, g);
      }
      if (primitive && x == 1) {
        for (Elem k = 0; k + 1 < q; ++k) log_table[exp_table[k]] = k;
        return;
      }
    }
    throw ValidationError("modulus is not irreducible: no primitive element");
  }
};

}  // namespace detail

/// The coefficient field F_q together with the choice of Frobenius convention.
///
/// With coeff_frobenius = false the semilinear map fixes constants; with true
/// it raises them to the p-th power. Copies share the underlying tables.
class FieldSpec {
 public:
  /// F_p, or F_{p^r} when `modulus` (monic degree-r polynomial over F_p, low
  /// degree first) is supplied.
  explicit FieldSpec(int p, std::vector<int> modulus = {}, bool coeff_frobenius = false) {
    if (p < 2 || p > 97 || !detail::is_prime(p)) throw ValidationError("p must be prime");
    auto data = std::make_shared<detail::FieldData>();
    data->p = p;
    data->coeff_frobenius = coeff_frobenius;
    if (!modulus.empty()) {
      for (int& c : modulus) c = detail::mod_p(c, p);
      detail::trim(modulus);
      if (modulus.size() < 2) throw ValidationError("modulus must have degree >= 1");
      const int lead_inv = detail::inv_mod_p(modulus.back(), p);
      for (int& c : modulus) c = c * lead_inv % p;
      if (!detail::is_irreducible(modulus, p)) throw ValidationError("modulus is not irreducible over F_p");
      data->r = static_cast<int>(modulus.size()) - 1;
    }
    std::uint64_t q = 1;
    for (int i = 0; i < data->r; ++i) {
      q *= static_cast<std::uint64_t>(p);
      if (q > detail::kMaxFieldSize) throw ValidationError("field too large (q > 2^20)");
    }
    data->q = static_cast<Elem>(q);
    data->modulus = std::move(modulus);
    data->build_tables();
    data_ = std::move(data);
  }

  /// F_{p^r} with the first irreducible modulus in counter order.
  static FieldSpec galois(int p, int r, bool coeff_frobenius = false) {
    if (r <= 1) return FieldSpec(p, {}, coeff_frobenius);
    return FieldSpec(p, detail::first_irreducible(p, r), coeff_frobenius);
  }

  int p() const noexcept { return data_->p; }
  int r() const noexcept { return data_->r; }
  Elem q() const noexcept { return data_->q; }
  const std::vector<int>& modulus() const noexcept { return data_->modulus; }
  bool coeff_frobenius() const noexcept { return data_->coeff_frobenius; }

  Elem zero() const noexcept { return 0; }
  Elem one() const noexcept { return 1; }

  Elem from_int(long long v) const noexcept { return static_cast<Elem>(detail::mod_p(v, p())); }

  /// The generator t (root of the modulus). Requires a modulus.
  Elem generator() const {
    if (r() > 1) return static_cast<Elem>(p());
    if (modulus().size() == 2) return from_int(-modulus()[0]);
    throw ValidationError("prime field has no generator t unless a modulus is given");
  }

  Elem add(Elem a, Elem b) const noexcept {
    const int pp = p();
    if (r() == 1) {
      Elem s = a + b;
      return s >= static_cast<Elem>(pp) ? s - pp : s;
    }
    if (pp == 2) return a ^ b;
    Elem out = 0, scale = 1;
    while (a || b) {
      Elem s = a % pp + b % pp;
      if (s >= static_cast<Elem>(pp)) s -= pp;
      out += s * scale;
      scale *= pp;
      a /= pp;
      b /= pp;
    }
    return out;
  }

  Elem neg(Elem a) const noexcept {
    const int pp = p();
    if (r() == 1) return a == 0 ? 0 : pp - a;
    if (pp == 2) return a;
    Elem out = 0, scale = 1;
    while (a) {
      const Elem d = a % pp;
      out += (d == 0 ? 0 : pp - d) * scale;
      scale *= pp;
      a /= pp;
    }
    return out;
  }

  Elem sub(Elem a, Elem b) const noexcept { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const noexcept {
    if (a == 0 || b == 0) return 0;
    if (r() == 1) return static_cast<Elem>((static_cast<std::uint64_t>(a) * b) % p());
    const std::uint64_t k = static_cast<std::uint64_t>(data_->log_table[a]) + data_->log_table[b];
    return data_->exp_table[k % (q() - 1)];
  }

  Elem inv(Elem a) const {
    if (a == 0) throw DivisionByZero();
    const Elem order = q() - 1;
    return data_->exp_table[(order - data_->log_table[a]) % order];
  }

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  Elem pow(Elem a, std::uint64_t e) const noexcept {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const std::uint64_t order = q() - 1;
    return data_->exp_table[(static_cast<std::uint64_t>(data_->log_table[a]) * (e % order)) % order];
  }

  /// Absolute Frobenius a -> a^p.
  Elem frobenius(Elem a) const noexcept { return r() == 1 ? a : pow(a, static_cast<std::uint64_t>(p())); }

  /// The coefficient action of the semilinear map.
  Elem phi(Elem a) const noexcept { return coeff_frobenius() ? frobenius(a) : a; }

  /// Coefficients of a as a polynomial in t, lowest degree first (length r).
  std::vector<int> digits(Elem a) const {
    std::vector<int> out(r(), 0);
    for (int i = 0; i < r(); ++i) {
      out[i] = static_cast<int>(a % p());
      a /= p();
    }
    return out;
  }

  Elem from_digits(std::span<const int> ds) const {
    Elem out = 0, scale = 1;
    for (std::size_t i = 0; i < ds.size() && static_cast<int>(i) < r(); ++i) {
      out += static_cast<Elem>(detail::mod_p(ds[i], p())) * scale;
      scale *= p();
    }
    return out;
  }

  /// Same field, other Frobenius convention.
  FieldSpec with_coeff_frobenius(bool on) const {
    if (on == coeff_frobenius()) return *this;
    auto data = std::make_shared<detail::FieldData>(*data_);
    data->coeff_frobenius = on;
    FieldSpec out(*this);
    out.data_ = std::move(data);
    return out;
  }

  std::string describe() const {
    std::string s = "F_" + std::to_string(q());
    if (r() > 1) {
      s += " = F_" + std::to_string(p()) + "[t]/(";
      bool first = true;
      for (int i = static_cast<int>(modulus().size()) - 1; i >= 0; --i) {
        if (modulus()[i] == 0) continue;
        if (!first) s += " + ";
        first = false;
        if (i == 0 || modulus()[i] != 1) s += std::to_string(modulus()[i]);
        if (i > 0) s += (modulus()[i] != 1 ? "*t" : "t") + (i > 1 ? "^" + std::to_string(i) : "");
      }
      s += ")";
    }
    return s;
  }

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) noexcept {
    if (a.data_ == b.data_) return true;
    return a.p() == b.p() && a.r() == b.r() && a.coeff_frobenius() == b.coeff_frobenius() &&
           (a.r() == 1 || a.modulus() == b.modulus());
  }

 private:
  std::shared_ptr<const detail::FieldData> data_;
};

/// A degree-e extension F_{q^e} of a base field and the embedding of F_q into it.
struct FieldExtension {
  FieldSpec field;
  std::vector<Elem> embedding;  // embedding[a] for a in the base field

  Elem embed(Elem a) const { return embedding.at(a); }
};

/// Builds F_{q^e} from the first irreducible polynomial of degree r*e over F_p.
/// The semilinear convention of the base is kept.
inline FieldExtension extend(const FieldSpec& base, int e) {
  if (e < 1) throw ValidationError("extension degree must be >= 1");
  if (e == 1) {
    std::vector<Elem> id(base.q());
    for (Elem a = 0; a < base.q(); ++a) id[a] = a;
    return {base, std::move(id)};
  }
  const int degree = base.r() * e;
  FieldSpec big = degree == 1 ? FieldSpec(base.p(), {}, base.coeff_frobenius())
                              : FieldSpec(base.p(), detail::first_irreducible(base.p(), degree), base.coeff_frobenius());
  std::vector<Elem> embedding(base.q());
  if (base.r() == 1) {
    for (Elem a = 0; a < base.q(); ++a) embedding[a] = a;
    return {big, std::move(embedding)};
  }
  // Image of t: a root of the base modulus inside the big field.
  const auto& mod = base.modulus();
  Elem root = 0;
  bool found = false;
  for (Elem beta = 0; beta < big.q() && !found; ++beta) {
    Elem acc = 0;
    for (int i = static_cast<int>(mod.size()) - 1; i >= 0; --i)
      acc = big.add(big.mul(acc, beta), big.from_int(mod[i]));
    if (acc == 0) {
      root = beta;
      found = true;
    }
  }
  if (!found) throw ValidationError("failed to embed base field into its extension");
  for (Elem a = 0; a < base.q(); ++a) {
    const auto ds = base.digits(a);
    Elem acc = 0;
    for (int i = static_cast<int>(ds.size()) - 1; i >= 0; --i) acc = big.add(big.mul(acc, root), big.from_int(ds[i]));
    embedding[a] = acc;
  }
  return {big, std::move(embedding)};
}

}  // namespace phimod
