#pragma once

// phi-modules (F_q((u))^d, A phi): conjugation and the congruence-subgroup
// solver g^{-1} A phi(g) = h^{-1} A.

#include <algorithm>
#include <string>
#include <vector>

#include "phimod/canonical.hpp"
#include "phimod/errors.hpp"
#include "phimod/matrix.hpp"

namespace phimod {

/// Smallest m >= 0 with A and A^{-1} in u^{-m} M_d(F_q[[u]]).
inline Exp lg_bound(const SeriesMatrix& a, Exp prec = kDefaultPrecision) {
  return std::max(a.pole_bound(), mat_inverse(a, prec).pole_bound());
}

class PhiModule {
 public:
  explicit PhiModule(SeriesMatrix a, Exp prec = kDefaultPrecision) : a_(std::move(a)) {
    const LaurentSeries dt = det(a_);
    if (dt.is_exact_zero()) throw Singular();
    if (dt.is_zero()) throw InsufficientPrecision("matrix not invertible at the stated precision");
    m_ = lg_bound(a_, prec);
  }

  const SeriesMatrix& matrix() const noexcept { return a_; }
  int d() const noexcept { return a_.d(); }
  Exp m() const noexcept { return m_; }
  const FieldSpec& field() const noexcept { return a_.field(); }

 private:
  SeriesMatrix a_;
  Exp m_ = 0;
};

/// A * g = g^{-1} A phi(g).
inline SeriesMatrix phi_conjugate(const SeriesMatrix& a, const SeriesMatrix& g, Exp prec = kDefaultPrecision) {
  return mat_inverse(g, prec) * a * apply_phi(g);
}

/// kappa(i) = p^i n - 2(1 + p + ... + p^{i-1}) m.
inline Exp kappa(int p, Exp n, Exp m, int i) {
  Exp pi = 1, geo = 0;
  for (int k = 0; k < i; ++k) {
    geo += pi;
    pi *= p;
  }
  return pi * n - 2 * geo * m;
}

/// Least valuation of the entries of g - I (its precision when all vanish).
inline Exp congruence_level(const SeriesMatrix& g) {
  const SeriesMatrix e = g - SeriesMatrix::identity(g.field(), g.d());
  Exp v = kExact;
  for (int i = 0; i < g.d(); ++i)
    for (int j = 0; j < g.d(); ++j) v = std::min(v, e(i, j).val_bound());
  return v;
}

namespace detail {

inline void check_contraction(int p, Exp n, Exp m) {
  if (n * (p - 1) <= 2 * m)
    throw HypothesisViolated("need n > 2m/(p-1): n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                             ", p=" + std::to_string(p));
}

inline void check_congruence(const SeriesMatrix& g, Exp n, const char* what) {
  const Exp lvl = congruence_level(g);
  if (lvl < n) throw HypothesisViolated(std::string(what) + " is not congruent to I mod u^" + std::to_string(n));
}

}  // namespace detail

/// The H in U_n with g^{-1} A phi(g) = H^{-1} A, for g in U_n.
inline SeriesMatrix conj_residual(const SeriesMatrix& a, const SeriesMatrix& g, Exp n, Exp prec = kDefaultPrecision) {
  const Exp m = lg_bound(a, prec);
  detail::check_contraction(a.field().p(), n, m);
  detail::check_congruence(g, n, "g");
  const SeriesMatrix h = a * mat_inverse(apply_phi(g), prec) * mat_inverse(a, prec) * g;
  detail::check_congruence(h, n, "H");
  return h;
}

/// One iterate of the solver: kappa(i), the least valuation of h_i - I
/// (capped by its precision) and that precision.
struct IterateRecord {
  int index;
  Exp kappa;
  Exp level;
  Exp certified;
};

enum class ProductOrder { LeftToRight, RightToLeft, Balanced };

struct ConjSolveOptions {
  Exp prec = kDefaultPrecision;
  ProductOrder order = ProductOrder::LeftToRight;
};

struct ConjSolution {
  SeriesMatrix g;
  std::vector<IterateRecord> trace;
  Exp m;
};

/// The unique g in U_n with g^{-1} A phi(g) = h^{-1} A mod u^prec, as the
/// product h_0 h_1 ... with h_0 = h and h_i = B phi(h_{i-1}) B^{-1}, B = h^{-1} A.
inline ConjSolution conj_solve_traced(const SeriesMatrix& a, const SeriesMatrix& h, Exp n,
                                      const ConjSolveOptions& opt = {}) {
  const FieldSpec& f = a.field();
  const int p = f.p();
  const Exp m = lg_bound(a, opt.prec);
  detail::check_contraction(p, n, m);
  detail::check_congruence(h, n, "h");
  const Exp target = opt.prec + 2 * m + 1;
  const Exp work = target + 2 * m + 4;
  const SeriesMatrix b = (mat_inverse(h, work) * a).truncated(work);
  const SeriesMatrix b_inv = (mat_inverse(a, work + 2 * m) * h).truncated(work);
  std::vector<SeriesMatrix> factors;
  std::vector<IterateRecord> trace;
  SeriesMatrix cur = h.truncated(work);
  for (int i = 0;; ++i) {
    const Exp k = kappa(p, n, m, i);
    const Exp lvl = congruence_level(cur);
    const Exp certified = cur.prec();
    trace.push_back({i, k, lvl, certified});
    if (lvl < std::min(k, certified))
      throw IterateEscaped("h_" + std::to_string(i) + " - I has valuation " + std::to_string(lvl) + " < kappa = " +
                           std::to_string(k));
    if (k >= target) break;
    factors.push_back(cur);
    cur = (b * apply_phi(cur) * b_inv).truncated(work);
  }
  SeriesMatrix g = SeriesMatrix::identity(f, a.d());
  switch (opt.order) {
    case ProductOrder::LeftToRight:
      for (const auto& x : factors) g = (g * x).truncated(work);
      break;
    case ProductOrder::RightToLeft:
      for (auto it = factors.rbegin(); it != factors.rend(); ++it) g = (*it * g).truncated(work);
      break;
    case ProductOrder::Balanced: {
      std::vector<SeriesMatrix> level = factors;
      while (level.size() > 1) {
        std::vector<SeriesMatrix> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back((level[i] * level[i + 1]).truncated(work));
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
      }
      if (!level.empty()) g = level.front();
      break;
    }
  }
  return {g.truncated(target), std::move(trace), m};
}

inline SeriesMatrix conj_solve(const SeriesMatrix& a, const SeriesMatrix& h, Exp n, Exp prec = kDefaultPrecision) {
  return conj_solve_traced(a, h, n, {prec, ProductOrder::LeftToRight}).g;
}

struct DetvalInvariant {
  Exp total;
  Exp class_mod;  // total mod (p-1), in [0, p-2]
};

inline DetvalInvariant detval_invariant(const SeriesMatrix& a) {
  const Exp total = det(a).val();
  const Exp mod = a.field().p() - 1;
  return {total, ((total % mod) + mod) % mod};
}

}  // namespace phimod
