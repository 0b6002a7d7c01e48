#pragma once

// Lattices in a box u^hi L0 ⊂ L ⊂ u^lo L0, enumerated by Hermite shape, and
// the Kisin-variety / flatness point sets built on that scan.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "phimod/canonical.hpp"
#include "phimod/errors.hpp"
#include "phimod/field.hpp"
#include "phimod/phimodule.hpp"

namespace phimod {

inline constexpr double kDefaultBoxLimit = 1e7;

struct BoxSpec {
  int d = 1;
  Exp lo = 0, hi = 0;
  std::optional<std::set<Exp>> detvals;  // keep only these det valuations
  double limit = kDefaultBoxLimit;
  int jobs = 1;
};

inline BoxSpec centered_box(int d, Exp N) {
  BoxSpec b;
  b.d = d;
  b.lo = -N;
  b.hi = N;
  return b;
}

/// Diagonal valuations plus the lowest admissible exponent of each
/// off-diagonal entry (row-major over i < j).
struct HermiteShape {
  std::vector<Exp> a;
  std::vector<Exp> low;

  Exp free_coefficients() const {
    Exp n = 0, k = 0;
    const int d = static_cast<int>(a.size());
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j, ++k) n += std::max<Exp>(0, a[i] - low[static_cast<std::size_t>(k)]);
    return n;
  }
};

inline std::vector<HermiteShape> box_shapes(const BoxSpec& box) {
  std::vector<HermiteShape> out;
  const int d = box.d;
  if (box.hi < box.lo) return out;
  std::vector<Exp> a(static_cast<std::size_t>(d), box.lo);
  while (true) {
    Exp total = 0;
    for (Exp x : a) total += x;
    if (!box.detvals || box.detvals->count(total)) {
      HermiteShape s;
      s.a = a;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          Exp low = box.lo;
          if (j == i + 1) low = std::max(low, a[i] + a[j] - box.hi);
          s.low.push_back(low);
        }
      out.push_back(std::move(s));
    }
    int pos = d - 1;
    while (pos >= 0 && a[static_cast<std::size_t>(pos)] == box.hi) a[static_cast<std::size_t>(pos--)] = box.lo;
    if (pos < 0) break;
    ++a[static_cast<std::size_t>(pos)];
  }
  std::stable_sort(out.begin(), out.end(), [](const HermiteShape& x, const HermiteShape& y) {
    Exp sx = 0, sy = 0;
    for (Exp v : x.a) sx += v;
    for (Exp v : y.a) sy += v;
    if (sx != sy) return sx < sy;
    return x.a < y.a;
  });
  return out;
}

/// Number of Hermite candidates the scan will visit (an upper bound on the
/// lattice count when d >= 3).
inline double box_estimate(const FieldSpec& f, const BoxSpec& box) {
  double total = 0;
  for (const auto& s : box_shapes(box)) total += std::pow(static_cast<double>(f.q()), static_cast<double>(s.free_coefficients()));
  return total;
}

namespace detail {

template <class Fn>
void scan_shape(const FieldSpec& f, const BoxSpec& box, const HermiteShape& s, Fn&& fn) {
  const int d = box.d;
  struct Slot {
    int i, j;
    Exp low, high;
  };
  std::vector<Slot> slots;
  std::size_t n = 0;
  {
    std::size_t k = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j, ++k) {
        const Exp low = s.low[k], high = s.a[static_cast<std::size_t>(i)];
        slots.push_back({i, j, low, high});
        n += static_cast<std::size_t>(std::max<Exp>(0, high - low));
      }
  }
  std::vector<Elem> digits(n, 0);
  const Elem q = f.q();
  while (true) {
    SeriesMatrix basis(f, d);
    for (int i = 0; i < d; ++i) basis(i, i) = LaurentSeries::monomial(f, 1, s.a[static_cast<std::size_t>(i)]);
    std::size_t pos = 0;
    for (const auto& sl : slots) {
      if (sl.high > sl.low) {
        std::vector<Elem> cs(digits.begin() + static_cast<std::ptrdiff_t>(pos),
                             digits.begin() + static_cast<std::ptrdiff_t>(pos + (sl.high - sl.low)));
        basis(sl.i, sl.j) = LaurentSeries::from_coeffs(f, sl.low, std::move(cs));
        pos += static_cast<std::size_t>(sl.high - sl.low);
      }
    }
    Lattice L = Lattice::from_hermite(std::move(basis), s.a);
    bool inside = true;
    if (d >= 3) {
      for (int k = 0; k < d && inside; ++k) {
        std::vector<LaurentSeries> e(static_cast<std::size_t>(d), LaurentSeries(f));
        e[static_cast<std::size_t>(k)] = LaurentSeries::monomial(f, 1, box.hi);
        inside = L.contains(e);
      }
    }
    if (inside) fn(L);
    std::size_t p = 0;
    while (p < n && digits[p] == q - 1) digits[p++] = 0;
    if (p == n) break;
    ++digits[p];
  }
}

}  // namespace detail

/// All lattices of the box satisfying `keep`, in shape order then counter
/// order. Shapes are distributed over `box.jobs` threads; the merge is by
/// shape index, so the output does not depend on the thread count.
inline std::vector<Lattice> box_scan(const FieldSpec& f, const BoxSpec& box,
                                     const std::function<bool(const Lattice&)>& keep) {
  const double est = box_estimate(f, box);
  if (est > box.limit) throw BoxTooLarge(est, box.limit);
  const std::vector<HermiteShape> shapes = box_shapes(box);
  std::vector<std::vector<Lattice>> per_shape(shapes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= shapes.size()) return;
      try {
        detail::scan_shape(f, box, shapes[k], [&](const Lattice& L) {
          if (keep(L)) per_shape[k].push_back(L);
        });
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = shapes.size();
        return;
      }
    }
  };
  const int jobs = std::max(1, box.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Lattice> out;
  for (auto& v : per_shape)
    for (auto& L : v) out.push_back(std::move(L));
  return out;
}

/// Every lattice with u^N L0 ⊂ L ⊂ u^{-N} L0.
inline std::vector<Lattice> enumerate_box(const FieldSpec& f, int d, Exp N, double limit = kDefaultBoxLimit) {
  BoxSpec b = centered_box(d, N);
  b.limit = limit;
  return box_scan(f, b, [](const Lattice&) { return true; });
}

/// Relative position of Phi(phi^* L) = A phi(g_L) with respect to L.
inline Coweight frobenius_type(const SeriesMatrix& A, const Lattice& L) {
  return cartan_type(L.inverse_basis() * A * apply_phi(L.basis()));
}

/// N = floor((m + delta)/(p - 1)), m = max(|nu_1|, |nu_d|), delta = max |cartan(A)|.
inline Exp kisin_box_bound(const PhiModule& A, const Coweight& nu) {
  const Exp m = std::max(std::abs(nu[0]), std::abs(nu[nu.size() - 1]));
  const Exp delta = cartan_type(A.matrix()).max_abs();
  return (m + delta) / (A.field().p() - 1);
}

enum class KisinMode { Open, Closed };

inline const char* mode_name(KisinMode m) { return m == KisinMode::Open ? "open" : "closed"; }

struct KisinPoint {
  Lattice lattice;
  Coweight type;
};

struct KisinReport {
  std::string kind;  // "open", "closed" or "flat"
  std::optional<Coweight> nu;
  Exp e = 0;
  int ext = 1;
  FieldSpec field;
  Exp box = 0;
  std::vector<Exp> detvals;  // det valuations scanned
  double candidates = 0;
  std::vector<KisinPoint> points;

  std::size_t count() const noexcept { return points.size(); }
};

struct ScanOptions {
  double limit = kDefaultBoxLimit;
  int jobs = 1;
  Exp extra_box = 0;  // enlarge the proven box, for soundness checks
};

inline SeriesMatrix base_change(const SeriesMatrix& A, const FieldExtension& ext) {
  return A.map_field(ext.field, [&](Elem c) { return ext.embed(c); });
}

/// Points of the Kisin variety C_nu(A) (closed) or its open stratum over F_{q^ext}.
inline KisinReport kisin_points(const PhiModule& A0, const Coweight& nu, int ext, KisinMode mode,
                                const ScanOptions& opt = {}) {
  if (static_cast<int>(nu.size()) != A0.d()) throw ValidationError("nu must have d components");
  const FieldExtension fx = extend(A0.field(), ext);
  const SeriesMatrix A = base_change(A0.matrix(), fx);
  const int p = fx.field.p();
  KisinReport rep{mode_name(mode), nu, 0, ext, fx.field, 0, {}, 0, {}};
  rep.box = kisin_box_bound(A0, nu) + opt.extra_box;
  const Exp vA = det(A).val();
  const Exp diff = nu.total() - vA;
  BoxSpec box = centered_box(A0.d(), rep.box);
  box.limit = opt.limit;
  box.jobs = opt.jobs;
  box.detvals = std::set<Exp>{};
  if (diff % (p - 1) == 0) box.detvals->insert(diff / (p - 1));
  rep.detvals.assign(box.detvals->begin(), box.detvals->end());
  rep.candidates = box_estimate(fx.field, box);
  const auto lattices = box_scan(fx.field, box, [&](const Lattice& L) {
    const Coweight t = frobenius_type(A, L);
    return mode == KisinMode::Open ? t == nu : dominance_leq(t, nu);
  });
  for (const auto& L : lattices) rep.points.push_back({L, frobenius_type(A, L)});
  return rep;
}

/// 0 <= nu'_i <= e h for the type nu' of (L, Phi(phi^* L)).
inline bool is_flat(const PhiModule& A, const Lattice& L, Exp e, Exp h) {
  const Coweight t = frobenius_type(A.matrix(), L);
  for (Exp x : t.components())
    if (x < 0 || x > e * h) return false;
  return true;
}

/// Lattices with u^e M ⊂ Phi(phi^* M) ⊂ M over F_{q^ext}.
inline KisinReport flat_points(const PhiModule& A0, Exp e, int ext, const ScanOptions& opt = {}) {
  const FieldExtension fx = extend(A0.field(), ext);
  const PhiModule A(base_change(A0.matrix(), fx));
  const int p = fx.field.p();
  const int d = A0.d();
  KisinReport rep{"flat", std::nullopt, e, ext, fx.field, 0, {}, 0, {}};
  const Exp delta = cartan_type(A0.matrix()).max_abs();
  rep.box = (e + delta) / (p - 1) + opt.extra_box;
  const Exp vA = det(A.matrix()).val();
  BoxSpec box = centered_box(d, rep.box);
  box.limit = opt.limit;
  box.jobs = opt.jobs;
  box.detvals = std::set<Exp>{};
  for (Exp t = 0; t <= d * e; ++t)
    if ((t - vA) % (p - 1) == 0) box.detvals->insert((t - vA) / (p - 1));
  rep.detvals.assign(box.detvals->begin(), box.detvals->end());
  rep.candidates = box_estimate(fx.field, box);
  const auto lattices = box_scan(fx.field, box, [&](const Lattice& L) { return is_flat(A, L, e, 1); });
  for (const auto& L : lattices) rep.points.push_back({L, frobenius_type(A.matrix(), L)});
  return rep;
}

/// F_q for q = p^r (first irreducible modulus).
inline FieldSpec field_of_order(long long q) {
  if (q < 2) throw ValidationError("field order must be a prime power");
  long long p = 2;
  while (q % p) ++p;
  int r = 0;
  long long x = q;
  while (x % p == 0) {
    x /= p;
    ++r;
  }
  if (x != 1) throw ValidationError("field order must be a prime power");
  return FieldSpec::galois(static_cast<int>(p), r);
}

/// Number of lattices u^{eh} L0 ⊂ L ⊂ L0 over F_q.
inline std::size_t local_model_count(const FieldSpec& f, int d, Exp e, Exp h, double limit = kDefaultBoxLimit, int jobs = 1) {
  BoxSpec box;
  box.d = d;
  box.lo = 0;
  box.hi = e * h;
  box.limit = limit;
  box.jobs = jobs;
  return box_scan(f, box, [](const Lattice&) { return true; }).size();
}

inline std::size_t local_model_count(int d, Exp e, Exp h, long long q) {
  return local_model_count(field_of_order(q), d, e, h);
}

}  // namespace phimod
