#pragma once

// Built-in invariant suites for `phimod selftest`.

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "phimod/phimod.hpp"

namespace selftest {

using namespace phimod;

struct SuiteResult {
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

namespace detail {

inline LaurentSeries poly(const FieldSpec& f, std::mt19937_64& rng, Exp lo, Exp hi) {
  std::vector<Elem> cs;
  for (Exp k = lo; k <= hi; ++k) cs.push_back(static_cast<Elem>(rng() % f.q()));
  return LaurentSeries::from_coeffs(f, lo, std::move(cs));
}

// k1 u^nu k2 with k1, k2 unipotent, so poles of A and A^{-1} are at most m.
inline SeriesMatrix bounded(const FieldSpec& f, int d, std::mt19937_64& rng, Exp m) {
  SeriesMatrix k1 = SeriesMatrix::identity(f, d), k2 = SeriesMatrix::identity(f, d);
  std::vector<Exp> nu;
  for (int i = 0; i < d; ++i) {
    nu.push_back(static_cast<Exp>(rng() % static_cast<std::uint64_t>(2 * m + 1)) - m);
    for (int j = i + 1; j < d; ++j) {
      k1(i, j) = poly(f, rng, 0, 2);
      k2(j, i) = poly(f, rng, 0, 2);
    }
  }
  return k1 * SeriesMatrix::monomial_diagonal(f, nu) * k2;
}

inline SeriesMatrix congruence(const FieldSpec& f, int d, std::mt19937_64& rng, Exp n) {
  SeriesMatrix h = SeriesMatrix::identity(f, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) h(i, j) += poly(f, rng, n, n + 3);
  return h;
}

inline SeriesMatrix mat(const FieldSpec& f, std::vector<std::vector<const char*>> rows) {
  std::vector<std::vector<LaurentSeries>> out;
  for (auto& r : rows) {
    out.emplace_back();
    for (auto* s : r) out.back().push_back(parse_series(f, s));
  }
  return SeriesMatrix::from_rows(f, out);
}

#define SELFTEST_CHECK(cond, msg) \
  do {                            \
    if (!(cond)) return msg;      \
  } while (0)

inline std::string conj_solve_suite() {
  std::mt19937_64 rng(11);
  for (int p : {2, 3, 5})
    for (int d = 1; d <= 2; ++d)
      for (int t = 0; t < 5; ++t) {
        const FieldSpec f(p);
        const SeriesMatrix a = bounded(f, d, rng, 1);
        const Exp m = lg_bound(a);
        const Exp n = 2 * m / (p - 1) + 1;
        const SeriesMatrix h = congruence(f, d, rng, n);
        const ConjSolution s = conj_solve_traced(a, h, n, {32, ProductOrder::LeftToRight});
        SELFTEST_CHECK(phi_conjugate(a, s.g, 80).agrees_to(mat_inverse(h, 80) * a, 32), "residual does not vanish");
        for (const auto& it : s.trace) SELFTEST_CHECK(it.kappa == kappa(p, n, m, it.index), "kappa mismatch");
        SELFTEST_CHECK(conj_solve_traced(a, h, n, {32, ProductOrder::Balanced}).g == s.g, "order dependence");
      }
  return "";
}

inline std::string isom_suite() {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 8; ++t) {
    const FieldSpec f(t % 2 ? 3 : 2);
    const SeriesMatrix a = bounded(f, 2, rng, 1), g = bounded(f, 2, rng, 1);
    const IsomReport r = isom_test(phi_conjugate(a, g, 96), a);
    SELFTEST_CHECK(r.verdict == Verdict::Isomorphic, "conjugate pair not recognised");
  }
  const FieldSpec f3(3);
  SELFTEST_CHECK(isom_test(mat(f3, {{"u"}}), mat(f3, {{"1"}})).verdict == Verdict::NonIsomorphic, "(u,1) over F_3");
  return "";
}

inline std::string kisin_suite() {
  const FieldSpec f2(2);
  const PhiModule d(mat(f2, {{"u", "0"}, {"0", "1"}}));
  SELFTEST_CHECK(kisin_points(PhiModule(mat(f2, {{"u", "0"}, {"0", "u"}})), Coweight({1, 1}), 1, KisinMode::Closed).count() == 1,
                 "uI count");
  SELFTEST_CHECK(kisin_points(d, Coweight({1, 0}), 1, KisinMode::Closed).count() == 3, "diag(u,1) over F_2");
  SELFTEST_CHECK(kisin_points(d, Coweight({1, 0}), 2, KisinMode::Closed).count() == 5, "diag(u,1) over F_4");
  SELFTEST_CHECK(flat_points(d, 1, 1).count() == 5, "flat points");
  std::mt19937_64 rng(17);
  for (int t = 0; t < 3; ++t) {
    const PhiModule a(bounded(f2, 2, rng, 1));
    const Coweight nu({det(a.matrix()).val() + 1, -1});
    const auto base = kisin_points(a, nu, 1, KisinMode::Closed);
    const auto wide = kisin_points(a, nu, 1, KisinMode::Closed, {kDefaultBoxLimit, 1, 2});
    SELFTEST_CHECK(base.count() == wide.count(), "box bound not sound");
  }
  return "";
}

inline std::string local_model_suite() {
  SELFTEST_CHECK(local_model_count(2, 1, 1, 2) == 5, "(2,1,1,2)");
  SELFTEST_CHECK(local_model_count(2, 2, 1, 2) == 15, "(2,2,1,2)");
  for (Exp e = 1; e <= 3; ++e)
    for (Exp h = 1; h <= 2; ++h)
      SELFTEST_CHECK(local_model_count(1, e, h, 3) == static_cast<std::size_t>(e * h + 1), "d = 1");
  return "";
}

inline std::string tree_suite() {
  for (int p : {2, 3}) {
    const FieldSpec f(p);
    const SeriesMatrix id = SeriesMatrix::identity(f, 2);
    const auto b = ball(TreeVertex::standard(f), 2);
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j)
        SELFTEST_CHECK(tree_distance(phi_vertex(id, b[i].vertex), phi_vertex(id, b[j].vertex)) ==
                           p * tree_distance(b[i].vertex, b[j].vertex),
                       "scaling law");
  }
  const FieldSpec f2(2);
  SELFTEST_CHECK(classify(mat(f2, {{"u", "0"}, {"0", "1"}})).module_type == ModuleType::Decomposable, "diag(u,1)");
  SELFTEST_CHECK(classify(mat(f2, {{"1", "u^-1"}, {"0", "1"}})).module_type == ModuleType::NonSplit, "unipotent");
  SELFTEST_CHECK(classify(mat(f2, {{"0", "1"}, {"u", "0"}})).module_type == ModuleType::Simple, "[[0,1],[u,0]]");
  std::mt19937_64 rng(19);
  for (int t = 0; t < 6; ++t) {
    const FieldSpec f(t % 2 ? 3 : 2);
    const int p = f.p();
    const SeriesMatrix a = bounded(f, 2, rng, 1);
    const TreeClassification c = classify(a);
    if (c.tree_case == TreeCase::B2)
      for (const auto& [x, m] : c.scan.ball) {
        const Exp t0 = tree_distance(x, *c.fixed_vertex);
        SELFTEST_CHECK((p - 1) * t0 <= m && m <= (p + 1) * t0, "sandwich");
      }
  }
  return "";
}

#undef SELFTEST_CHECK

}  // namespace detail

inline std::vector<SuiteResult> run_all() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> suites{
      {"conj-solve", detail::conj_solve_suite}, {"isom", detail::isom_suite},
      {"kisin", detail::kisin_suite},           {"local-model", detail::local_model_suite},
      {"tree", detail::tree_suite},
  };
  std::vector<SuiteResult> out;
  for (const auto& [name, fn] : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
      err = fn();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({name, err.empty(), err, secs});
  }
  return out;
}

}  // namespace selftest
