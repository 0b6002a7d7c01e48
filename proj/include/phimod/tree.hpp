#pragma once

// The Bruhat-Tits tree of PGL_2 over F_q((u)) and the action of
// Phi = A phi on it.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "phimod/canonical.hpp"
#include "phimod/errors.hpp"
#include "phimod/phimodule.hpp"

namespace phimod {

/// Homothety class of a rank-2 lattice, represented by its Hermite basis
/// scaled so that the det valuation is 0 or 1.
class TreeVertex {
 public:
  static TreeVertex of(const Lattice& L) {
    if (L.d() != 2) throw ValidationError("tree vertices need d = 2");
    const Exp dv = L.detval();
    const Exp k = dv >= 0 ? dv / 2 : -((-dv + 1) / 2);
    return TreeVertex(L.scaled(-k));
  }
  static TreeVertex standard(const FieldSpec& f) { return TreeVertex(Lattice::standard(f, 2)); }

  const Lattice& rep() const noexcept { return rep_; }
  const FieldSpec& field() const noexcept { return rep_.field(); }
  Exp detval() const noexcept { return rep_.detval(); }

  friend bool operator==(const TreeVertex& a, const TreeVertex& b) { return a.rep_ == b.rep_; }
  friend bool operator<(const TreeVertex& a, const TreeVertex& b) { return a.rep_ < b.rep_; }

 private:
  explicit TreeVertex(Lattice L) : rep_(std::move(L)) {}
  Lattice rep_;
};

inline Exp tree_distance(const TreeVertex& x, const TreeVertex& y) {
  const Coweight c = relative_position(x.rep(), y.rep());
  return c[0] - c[1];
}

/// The class of A phi(g_x) F_q[[u]]^2.
inline TreeVertex phi_vertex(const SeriesMatrix& A, const TreeVertex& x) {
  return TreeVertex::of(lattice_hnf(A * apply_phi(x.rep().basis())));
}

inline Exp displacement(const SeriesMatrix& A, const TreeVertex& x) { return tree_distance(x, phi_vertex(A, x)); }

namespace detail {

inline SeriesMatrix from_columns(const FieldSpec& f, const std::vector<LaurentSeries>& c0,
                                 const std::vector<LaurentSeries>& c1) {
  SeriesMatrix m(f, 2);
  for (int i = 0; i < 2; ++i) {
    m(i, 0) = c0[static_cast<std::size_t>(i)];
    m(i, 1) = c1[static_cast<std::size_t>(i)];
  }
  return m;
}

inline std::vector<LaurentSeries> axpy(const std::vector<LaurentSeries>& v, const LaurentSeries& c,
                                       const std::vector<LaurentSeries>& w) {
  return {v[0] + c * w[0], v[1] + c * w[1]};
}

// Runs fn(i) for i < n on up to `jobs` threads; results go to caller-owned slots.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex m;
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t k = 0; k < t; ++k)
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += t) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// The q+1 neighbours: classes of span(v + c w, u w) for c in F_q, then span(w, u v).
inline std::vector<TreeVertex> neighbors(const TreeVertex& x) {
  const FieldSpec& f = x.field();
  const SeriesMatrix& g = x.rep().basis();
  const auto v = g.column(0), w = g.column(1);
  const LaurentSeries u = LaurentSeries::monomial(f, 1, 1);
  const std::vector<LaurentSeries> uv{u * v[0], u * v[1]}, uw{u * w[0], u * w[1]};
  std::vector<TreeVertex> out;
  for (Elem c = 0; c < f.q(); ++c)
    out.push_back(TreeVertex::of(lattice_hnf(detail::from_columns(f, detail::axpy(v, LaurentSeries::constant(f, c), w), uw))));
  out.push_back(TreeVertex::of(lattice_hnf(detail::from_columns(f, w, uv))));
  return out;
}

/// (q+1) q^{R-1} + ... + 1.
inline double ball_size(Elem q, Exp radius) {
  double total = 1, shell = q + 1.0;
  for (Exp k = 1; k <= radius; ++k) {
    total += shell;
    shell *= q;
  }
  return total;
}

struct BallEntry {
  TreeVertex vertex;
  Exp distance;               // from the centre
  std::optional<std::size_t> parent;
};

/// Breadth-first ball; neighbours are visited in the order of neighbors().
inline std::vector<BallEntry> ball(const TreeVertex& center, Exp radius, double limit = 1e6) {
  const double est = ball_size(center.field().q(), radius);
  if (est > limit) throw BoxTooLarge(est, limit);
  std::vector<BallEntry> out{{center, 0, std::nullopt}};
  std::set<std::vector<std::int64_t>> seen{center.rep().signature()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].distance == radius) continue;
    for (auto& y : neighbors(out[i].vertex))
      if (seen.insert(y.rep().signature()).second) out.push_back({std::move(y), out[i].distance + 1, i});
  }
  return out;
}

struct DisplacementScan {
  TreeVertex x_star;
  Exp m_min;
  Exp radius;
  std::vector<std::pair<TreeVertex, Exp>> ball;  // vertex, d(x, Phi x)
};

/// Every minimiser of d(x, Phi x) lies within 2 d(s, Phi s)/(p-1) of the start s.
inline DisplacementScan min_displacement_search(const SeriesMatrix& A, const TreeVertex& start, double limit = 1e6,
                                                int jobs = 1) {
  const int p = A.field().p();
  const Exp d0 = displacement(A, start);
  const Exp R = (2 * d0 + p - 2) / (p - 1);
  const auto entries = ball(start, R, limit);
  std::vector<Exp> disp(entries.size());
  detail::parallel_for(entries.size(), jobs, [&](std::size_t i) { disp[i] = displacement(A, entries[i].vertex); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (disp[i] < disp[best]) best = i;
  DisplacementScan scan{entries[best].vertex, disp[best], R, {}};
  for (std::size_t i = 0; i < entries.size(); ++i) scan.ball.emplace_back(entries[i].vertex, disp[i]);
  return scan;
}

// ---------------------------------------------------------------------------
// Phi-stable lines

struct RankOneLine {
  std::vector<LaurentSeries> v;  // (1, x) or (0, 1)
  LaurentSeries lambda;          // A phi(v) = lambda v
  Exp certified;                 // the residual vanishes below u^certified
};

struct RankOneOptions {
  int depth = 8;
  Exp prec = 32;
  std::size_t node_limit = 200000;
};

struct RankOneSearch {
  std::vector<RankOneLine> lines;
  Exp window_lo = 0, window_hi = 0;  // leading valuations tried
  std::size_t nodes = 0;
  bool complete = true;  // false when the node limit cut the search
};

namespace detail {

inline Exp sat_add(Exp a, Exp b) { return (a >= kExact || b >= kExact) ? kExact : a + b; }

}  // namespace detail

/// Lines L with A phi(L) = L. A line (1, x) is stable iff
/// P(x) = A10 + A11 phi(x) - x A00 - x A01 phi(x) = 0; the coefficients of x
/// are chosen one at a time, pruning when P(x mod u^k) fails below the
/// valuation that the unknown tail can still reach.
inline RankOneSearch rank_one_subs(const SeriesMatrix& A, const RankOneOptions& opt = {}) {
  if (A.d() != 2) throw ValidationError("rank-one search needs d = 2");
  const FieldSpec& f = A.field();
  const int p = f.p();
  const Exp m = lg_bound(A);
  const LaurentSeries &a00 = A(0, 0), &a01 = A(0, 1), &a10 = A(1, 0), &a11 = A(1, 1);
  auto v_of = [](const LaurentSeries& s) { return s.is_exact_zero() ? kExact : s.val_bound(); };
  const Exp v00 = v_of(a00), v01 = v_of(a01), v11 = v_of(a11);
  const Exp target = opt.prec;
  RankOneSearch out;
  out.window_lo = -(m + opt.depth);
  out.window_hi = m + opt.depth;

  auto residual_prec = [&](const std::vector<LaurentSeries>& v, const LaurentSeries& lambda) {
    const std::vector<LaurentSeries> r = A * std::vector<LaurentSeries>{apply_phi(v[0]), apply_phi(v[1])};
    Exp c = kExact;
    for (int i = 0; i < 2; ++i) {
      const LaurentSeries e = r[static_cast<std::size_t>(i)] - lambda * v[static_cast<std::size_t>(i)];
      if (!e.is_zero()) return e.start();
      c = std::min(c, e.prec());
    }
    return c;
  };
  auto record = [&](const LaurentSeries& x) {
    const std::vector<LaurentSeries> v{LaurentSeries::one(f), x};
    const LaurentSeries lambda = a00 + a01 * apply_phi(x);
    out.lines.push_back({v, lambda, std::min(residual_prec(v, lambda), target)});
  };

  // x = 0 and the line of e2
  if (a10.is_zero()) {
    if (a10.prec() < target) throw InsufficientPrecision("A(1,0) not certified to the search precision");
    record(LaurentSeries::zero(f));
  }
  if (a01.is_zero()) {
    if (a01.prec() < target) throw InsufficientPrecision("A(0,1) not certified to the search precision");
    const std::vector<LaurentSeries> v{LaurentSeries::zero(f), LaurentSeries::one(f)};
    out.lines.push_back({v, a11, std::min(residual_prec(v, a11), target)});
  }

  for (Exp lead = out.window_lo; lead <= out.window_hi && out.complete; ++lead) {
    // bound on val P(x) - P(x mod u^k) when val x = lead
    auto tail_bound = [&](Exp k) {
      return std::min({detail::sat_add(k, v00), detail::sat_add(p * k, v11),
                       detail::sat_add(std::min(k + p * lead, lead + p * k), v01)});
    };
    std::vector<Elem> coeffs;
    auto dfs = [&](auto&& self) -> void {
      if (++out.nodes > opt.node_limit) {
        out.complete = false;
        return;
      }
      const Exp k = lead + static_cast<Exp>(coeffs.size());
      const LaurentSeries x = LaurentSeries::from_coeffs(f, lead, coeffs);
      const LaurentSeries px = apply_phi(x);
      const LaurentSeries P = a10 + a11 * px - x * a00 - x * a01 * px;
      const Exp bound = tail_bound(k);
      const Exp check = std::min(bound, P.prec());
      if (!P.is_zero() && P.start() < check) return;
      if (bound >= target) {
        if (P.prec() < target) throw InsufficientPrecision("entries of A not certified to the search precision");
        record(x);
        return;
      }
      for (Elem c = 0; c < f.q() && out.complete; ++c) {
        coeffs.push_back(c);
        self(self);
        coeffs.pop_back();
      }
    };
    for (Elem c = 1; c < f.q() && out.complete; ++c) {
      coeffs.assign(1, c);
      dfs(dfs);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class TreeCase { A1, A2, A3_B1, B2 };
enum class ModuleType { Simple, Decomposable, NonSplit, NotAbsolutelySimple };

inline const char* case_name(TreeCase c) {
  switch (c) {
    case TreeCase::A1: return "A1";
    case TreeCase::A2: return "A2";
    case TreeCase::A3_B1: return "A3/B1";
    case TreeCase::B2: return "B2";
  }
  return "?";
}

inline const char* module_type_name(ModuleType t) {
  switch (t) {
    case ModuleType::Simple: return "Simple";
    case ModuleType::Decomposable: return "Decomposable";
    case ModuleType::NonSplit: return "NonSplit";
    case ModuleType::NotAbsolutelySimple: return "NotAbsolutelySimple";
  }
  return "?";
}

struct TreeClassification {
  TreeCase tree_case;
  ModuleType module_type;
  std::optional<TreeVertex> fixed_vertex;
  std::optional<Exp> s;                          // Phi(phi^* M0) = u^s M0, s taken in [0, p-2]
  std::optional<std::size_t> link_fixed_count;
  std::optional<RankOneSearch> rank_one;          // only when m_min > 0
  DisplacementScan scan;
};

namespace detail {

// Number of lines w of F_q^2 with K phi(w) on the line w.
inline std::size_t link_fixed_points(const FieldSpec& f, const Elem k[2][2]) {
  std::size_t n = 0;
  auto fixed = [&](Elem w0, Elem w1) {
    const Elem a = f.phi(w0), b = f.phi(w1);
    const Elem y0 = f.add(f.mul(k[0][0], a), f.mul(k[0][1], b));
    const Elem y1 = f.add(f.mul(k[1][0], a), f.mul(k[1][1], b));
    return f.sub(f.mul(y0, w1), f.mul(y1, w0)) == 0;
  };
  for (Elem c = 0; c < f.q(); ++c) n += fixed(1, c);
  n += fixed(0, 1);
  return n;
}

}  // namespace detail

inline TreeClassification classify(const SeriesMatrix& A, const RankOneOptions& ropt = {}, double limit = 1e6,
                                   int jobs = 1) {
  const FieldSpec& f = A.field();
  if (A.d() != 2) throw ValidationError("classification needs d = 2");
  DisplacementScan scan = min_displacement_search(A, TreeVertex::standard(f), limit, jobs);
  if (scan.m_min == 0) {
    const TreeVertex x0 = scan.x_star;
    const SeriesMatrix c0 = x0.rep().inverse_basis() * A * apply_phi(x0.rep().basis());
    const Coweight t = cartan_type(c0);
    const Exp s = t[0];
    const SeriesMatrix k = c0.shifted(-s);
    Elem kbar[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        if (k(i, j).prec() <= 0) throw InsufficientPrecision("link map not certified");
        kbar[i][j] = k(i, j).coeff(0);
      }
    const std::size_t fixed = detail::link_fixed_points(f, kbar);
    const ModuleType type = fixed >= 2 ? ModuleType::Decomposable
                            : fixed == 1 ? ModuleType::NonSplit
                                         : ModuleType::NotAbsolutelySimple;
    const Exp mod = f.p() - 1;
    return {TreeCase::B2, type, x0, ((s % mod) + mod) % mod, fixed, std::nullopt, std::move(scan)};
  }
  RankOneSearch subs = rank_one_subs(A, ropt);
  const std::size_t n = subs.lines.size();
  const TreeCase c = n == 0 ? TreeCase::A1 : n == 1 ? TreeCase::A3_B1 : TreeCase::A2;
  const ModuleType type = n == 0 ? ModuleType::Simple : n == 1 ? ModuleType::NonSplit : ModuleType::Decomposable;
  return {c, type, std::nullopt, std::nullopt, std::nullopt, std::move(subs), std::move(scan)};
}

}  // namespace phimod
