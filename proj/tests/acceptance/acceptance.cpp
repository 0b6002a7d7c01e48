// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "phimod/phimod.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace phimod;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;
  void fail(const std::string& why) {
    if (ok) note = why;
    ok = false;
  }
};

SeriesMatrix M(const FieldSpec& f, std::vector<std::vector<const char*>> rows) {
  std::vector<std::vector<LaurentSeries>> out;
  for (auto& r : rows) {
    out.emplace_back();
    for (auto* s : r) out.back().push_back(parse_series(f, s));
  }
  return SeriesMatrix::from_rows(f, out);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random solver instance: A with poles of order <= m, h in U_n.
struct SolverCase {
  SeriesMatrix a, h;
  Exp n;
};

SolverCase solver_case(std::mt19937_64& rng, int i) {
  static const int primes[] = {2, 3, 5};
  const FieldSpec f(primes[i % 3]);
  const int d = 1 + (i / 3) % 3;
  const Exp m_target = (i / 9) % 3;
  const SeriesMatrix a = testsupport::random_bounded(f, d, rng, m_target);
  const Exp m = lg_bound(a);
  const Exp n = 2 * m / (f.p() - 1) + 1;
  return {a, testsupport::random_congruence(f, d, rng, n), n};
}

Outcome criterion1() {
  Outcome out;
  std::mt19937_64 rng(1001);
  std::vector<SolverCase> cases;
  for (int i = 0; i < 200; ++i) cases.push_back(solver_case(rng, i));
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& c : cases) {
    const int p = c.a.field().p();
    const ConjSolution s = conj_solve_traced(c.a, c.h, c.n, {64, ProductOrder::LeftToRight});
    const SeriesMatrix lhs = phi_conjugate(c.a, s.g, 160);
    const SeriesMatrix rhs = mat_inverse(c.h, 160) * c.a;
    if (!lhs.agrees_to(rhs, 64)) out.fail("residual nonzero below u^64");
    for (const auto& it : s.trace) {
      if (it.kappa != kappa(p, c.n, s.m, it.index)) out.fail("kappa sequence differs");
      if (it.level < std::min(it.kappa, it.certified)) out.fail("iterate outside U_kappa");
    }
  }
  const double t = seconds_since(t0);
  if (t >= 10) out.fail("runtime " + std::to_string(t) + " s");
  out.note += (out.note.empty() ? "" : "; ") + std::to_string(t) + " s";
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::mt19937_64 rng(1002);
  for (int i = 0; i < 100; ++i) {
    const SolverCase c = solver_case(rng, i);
    const SeriesMatrix g1 = conj_solve_traced(c.a, c.h, c.n, {64, ProductOrder::LeftToRight}).g;
    const SeriesMatrix g2 = conj_solve_traced(c.a, c.h, c.n, {64, ProductOrder::RightToLeft}).g;
    const SeriesMatrix g3 = conj_solve_traced(c.a, c.h, c.n, {64, ProductOrder::Balanced}).g;
    if (!(g1 == g2) || !(g1 == g3)) out.fail("product order changes g");
    if (!conj_residual(c.a, g1, c.n, 160).agrees_to(c.h, 64)) out.fail("conj_residual(conj_solve(h)) != h");
  }
  return out;
}

std::set<testsupport::Subspace> images(const KisinReport& r, Exp N) {
  std::set<testsupport::Subspace> out;
  for (const auto& p : r.points) out.insert(testsupport::lattice_image(p.lattice.basis(), -N, N));
  return out;
}

Outcome criterion3() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const FieldSpec f2(2);
  auto closed = [](std::vector<Exp> nu) {
    return [nu](const std::vector<Exp>& t) { return testsupport::prefix_dominated(t, nu); };
  };
  auto check = [&](const std::string& what, const KisinReport& r, std::size_t expect, const SeriesMatrix& a_ext,
                   const std::function<bool(const std::vector<Exp>&)>& accept, const std::function<bool(Exp)>& total_ok) {
    const Exp N = r.box + 2;
    const auto oracle = testsupport::brute_force_points(a_ext, N, accept, total_ok);
    if (r.count() != expect) out.fail(what + ": count " + std::to_string(r.count()));
    if (oracle.size() != expect) out.fail(what + ": oracle count " + std::to_string(oracle.size()));
    if (images(r, N) != oracle) out.fail(what + ": point sets differ from oracle");
  };

  const PhiModule ui(M(f2, {{"u", "0"}, {"0", "u"}}));
  check("uI", kisin_points(ui, Coweight({1, 1}), 1, KisinMode::Closed), 1, ui.matrix(), closed({1, 1}),
        [](Exp t) { return t == 2; });
  const PhiModule d(M(f2, {{"u", "0"}, {"0", "1"}}));
  check("diag F2", kisin_points(d, Coweight({1, 0}), 1, KisinMode::Closed), 3, d.matrix(), closed({1, 0}),
        [](Exp t) { return t == 1; });
  const FieldExtension f4 = extend(f2, 2);
  check("diag F4", kisin_points(d, Coweight({1, 0}), 2, KisinMode::Closed), 5, base_change(d.matrix(), f4),
        closed({1, 0}), [](Exp t) { return t == 1; });
  const KisinReport fl = flat_points(d, 1, 1);
  check("flat", fl, 5, d.matrix(),
        [](const std::vector<Exp>& t) { return t.back() >= 0 && t.front() <= 1; },
        [](Exp t) { return t >= 0 && t <= 2; });
  const Lattice m0 = lattice_hnf(M(f2, {{"u^-1", "0"}, {"0", "1"}}));
  bool has_m0 = false, has_um0 = false;
  for (const auto& p : fl.points) {
    has_m0 = has_m0 || (p.lattice == m0 && p.type == Coweight({0, 0}));
    has_um0 = has_um0 || (p.lattice == m0.scaled(1) && p.type == Coweight({1, 1}));
  }
  if (!has_m0) out.fail("flat points miss diag(u^-1,1) L0");
  if (!has_um0) out.fail("flat points miss u diag(u^-1,1) L0");
  const double t = seconds_since(t0);
  if (t >= 60) out.fail("runtime " + std::to_string(t) + " s");
  out.note += (out.note.empty() ? "" : "; ") + std::to_string(t) + " s";
  return out;
}

Outcome criterion4() {
  Outcome out;
  std::mt19937_64 rng(1004);
  int nonempty = 0;
  for (int i = 0; i < 20; ++i) {
    const FieldSpec f(i % 2 ? 3 : 2);
    const PhiModule a(testsupport::random_bounded(f, 2, rng, 2, 1));
    const Exp vA = det(a.matrix()).val();
    // a coweight with |nu_i| <= 2 meeting the det-valuation congruence when possible
    Exp n1 = std::uniform_int_distribution<Exp>(-2, 2)(rng), n2 = std::uniform_int_distribution<Exp>(-2, 2)(rng);
    for (int tries = 0; tries < 25 && (n1 + n2 - vA) % (f.p() - 1) != 0; ++tries) {
      n1 = std::uniform_int_distribution<Exp>(-2, 2)(rng);
      n2 = std::uniform_int_distribution<Exp>(-2, 2)(rng);
    }
    const Coweight nu({n1, n2});
    const KisinReport base = kisin_points(a, nu, 1, KisinMode::Closed);
    const KisinReport wide = kisin_points(a, nu, 1, KisinMode::Closed, {kDefaultBoxLimit, 4, 2});
    std::set<std::vector<std::int64_t>> s1, s2;
    for (const auto& p : base.points) s1.insert(p.lattice.signature());
    for (const auto& p : wide.points) s2.insert(p.lattice.signature());
    if (s1 != s2) out.fail("point sets differ at N and N+2 for nu = " + nu.str());
    nonempty += !s1.empty();
  }
  out.note += (out.note.empty() ? "" : "; ") + std::to_string(nonempty) + "/20 nonempty";
  return out;
}

Outcome criterion5() {
  Outcome out;
  for (int p : {2, 3}) {
    const FieldSpec f(p);
    const SeriesMatrix id = SeriesMatrix::identity(f, 2);
    const auto b = ball(TreeVertex::standard(f), 3);
    std::vector<TreeVertex> img;
    for (const auto& e : b) img.push_back(phi_vertex(id, e.vertex));
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i; j < b.size(); ++j)
        if (tree_distance(img[i], img[j]) != p * tree_distance(b[i].vertex, b[j].vertex)) out.fail("scaling law");
  }
  std::mt19937_64 rng(1005);
  const FieldSpec f3(3);
  for (int i = 0; i < 500; ++i) {
    const Lattice L = lattice_hnf(testsupport::random_bounded(f3, 3, rng, 2));
    const Lattice Mx = lattice_hnf(testsupport::random_bounded(f3, 3, rng, 2));
    const Lattice N = lattice_hnf(testsupport::random_bounded(f3, 3, rng, 2));
    const Coweight lm = relative_position(L, Mx), mn = relative_position(Mx, N), ln = relative_position(L, N);
    std::vector<Exp> sum;
    for (std::size_t k = 0; k < 3; ++k) sum.push_back(lm[k] + mn[k]);
    if (!testsupport::prefix_dominated(ln.components(), Coweight(sum).components())) out.fail("triangle inequality");
    if (!(relative_position(Mx, L) == lm.dual())) out.fail("antisymmetry");
    if (!(cartan_type(mat_inverse(L.basis(), 64) * Mx.basis()) == lm)) out.fail("relative position");
  }
  return out;
}

std::vector<SeriesMatrix> curated_and_random() {
  const FieldSpec f2(2), f3(3);
  std::vector<SeriesMatrix> suite{M(f2, {{"u", "0"}, {"0", "1"}}), M(f2, {{"0", "1"}, {"u", "0"}}),
                                  M(f2, {{"1", "u^-1"}, {"0", "1"}}), M(f2, {{"u", "0"}, {"0", "u"}}),
                                  SeriesMatrix::identity(f2, 2)};
  std::mt19937_64 rng(1006);
  for (int i = 0; i < 20; ++i) suite.push_back(testsupport::random_bounded(i % 2 ? f3 : f2, 2, rng, 1 + i % 2, 1));
  return suite;
}

Outcome criterion6() {
  Outcome out;
  std::map<TreeCase, int> seen;
  for (const auto& a : curated_and_random()) {
    const int p = a.field().p();
    const TreeClassification c = classify(a);
    ++seen[c.tree_case];
    if (c.tree_case == TreeCase::B2)
      for (const auto& [x, m] : c.scan.ball) {
        const Exp t = tree_distance(x, *c.fixed_vertex);
        if ((p - 1) * t > m || m > (p + 1) * t) out.fail("sandwich");
      }
    if (c.tree_case == TreeCase::A1)
      for (const auto& [x, m] : c.scan.ball) {
        if (m - (p + 1) < c.scan.m_min) continue;
        int down = 0;
        for (const auto& y : neighbors(x)) down += displacement(a, y) == m - (p + 1);
        if (down != 1) out.fail("radial law");
      }
  }
  std::string counts;
  for (const auto& [k, v] : seen) counts += std::string(counts.empty() ? "" : ", ") + case_name(k) + "=" + std::to_string(v);
  out.note += (out.note.empty() ? "" : "; ") + counts;
  return out;
}

Outcome criterion7() {
  Outcome out;
  std::mt19937_64 rng(1007);
  for (int i = 0; i < 100; ++i) {
    const FieldSpec f(i % 2 ? 3 : 2);
    const int d = 1 + (i / 2) % 2;
    const SeriesMatrix a = testsupport::random_bounded(f, d, rng, 1, 1);
    const SeriesMatrix g = testsupport::random_bounded(f, d, rng, 1, 1);
    const SeriesMatrix b = phi_conjugate(a, g, 128);
    const IsomReport r = isom_test(b, a);
    if (r.verdict != Verdict::Isomorphic) {
      out.fail("conjugate pair reported " + std::string(verdict_name(r.verdict)));
      continue;
    }
    if (!phi_conjugate(a, *r.witness, 128).agrees_to(b, r.residual_prec) || r.residual_prec < 32)
      out.fail("witness not certified");
  }
  const FieldSpec f2(2), f3(3);
  const IsomReport r1 = isom_test(M(f3, {{"u"}}), M(f3, {{"1"}}));
  if (r1.verdict != Verdict::NonIsomorphic || r1.detail.find("det-valuation") == std::string::npos)
    out.fail("(u,1) over F_3");
  const IsomReport r2 = isom_test(M(f2, {{"1+u"}}), M(f2, {{"1"}}));
  if (r2.verdict != Verdict::Isomorphic || !(*r2.witness)(0, 0).agrees_to(parse_series(f2, "1+u"), r2.witness->prec()))
    out.fail("(1+u,1) over F_2");
  return out;
}

Outcome criterion8() {
  Outcome out;
  const FieldSpec f2(2), f3(3);
  struct Case {
    SeriesMatrix a;
    ModuleType expect;
  };
  const std::vector<Case> cases{{M(f2, {{"u", "0"}, {"0", "1"}}), ModuleType::Decomposable},
                                {M(f3, {{"u", "0"}, {"0", "1"}}), ModuleType::Decomposable},
                                {M(f2, {{"u^2", "0"}, {"0", "u^-1"}}), ModuleType::Decomposable},
                                {M(f2, {{"1", "u^-1"}, {"0", "1"}}), ModuleType::NonSplit},
                                {M(f2, {{"0", "1"}, {"u", "0"}}), ModuleType::Simple}};
  for (const auto& c : cases) {
    const TreeClassification cl = classify(c.a);
    if (cl.module_type != c.expect) out.fail(std::string("verdict ") + module_type_name(cl.module_type));
    const std::size_t lines = testsupport::brute_force_lines(c.a, -4, 4);
    const bool agrees = c.expect == ModuleType::Decomposable ? lines >= 2
                        : c.expect == ModuleType::NonSplit   ? lines == 1
                                                             : lines == 0;
    if (!agrees) out.fail("rank-one oracle found " + std::to_string(lines) + " lines");
  }
  return out;
}

Outcome criterion9() {
  Outcome out;
  const FieldSpec f2(2);
  if (local_model_count(2, 1, 1, 2) != 5) out.fail("(2,1,1,2)");
  if (local_model_count(2, 2, 1, 2) != 15) out.fail("(2,2,1,2)");
  if (testsupport::count_submodules(f2, 2, 1) != 5) out.fail("oracle (2,1,1,2)");
  if (testsupport::count_submodules(f2, 2, 2) != 15) out.fail("oracle (2,2,1,2)");
  for (long long q : {2, 3, 4, 5})
    for (Exp e = 1; e <= 3; ++e)
      for (Exp h = 1; h <= 3; ++h) {
        const std::size_t n = local_model_count(1, e, h, q);
        if (n != static_cast<std::size_t>(e * h + 1)) out.fail("d = 1");
        double size = 1;
        for (Exp k = 0; k < e * h; ++k) size *= static_cast<double>(q);
        if (size <= 65536 && testsupport::count_submodules(field_of_order(q), 1, e * h) != n) out.fail("oracle d = 1");
      }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"conjugation solver", criterion1}, {"uniqueness", criterion2},       {"Kisin counts", criterion3},
      {"box soundness", criterion4},      {"building laws", criterion5},    {"sandwich and radial laws", criterion6},
      {"isomorphism test", criterion7},   {"classification", criterion8},   {"local model", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.ok;
    std::printf("criterion %zu (%s): %s%s%s\n", i + 1, criteria[i].first.c_str(), o.ok ? "PASS" : "FAIL",
                o.note.empty() ? "" : " - ", o.note.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
