#include <gtest/gtest.h>

#include <map>
#include <random>

#include "phimod/literal.hpp"
#include "phimod/tree.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace phimod;

namespace {

SeriesMatrix M(const FieldSpec& f, std::vector<std::vector<const char*>> rows) {
  std::vector<std::vector<LaurentSeries>> out;
  for (auto& r : rows) {
    out.emplace_back();
    for (auto* s : r) out.back().push_back(parse_series(f, s));
  }
  return SeriesMatrix::from_rows(f, out);
}

TreeVertex V(const SeriesMatrix& g) { return TreeVertex::of(lattice_hnf(g)); }

// Graph distances from `from` by breadth-first search over neighbors().
std::map<std::vector<std::int64_t>, Exp> bfs(const TreeVertex& from, Exp radius) {
  std::map<std::vector<std::int64_t>, Exp> dist{{from.rep().signature(), 0}};
  std::vector<TreeVertex> frontier{from};
  for (Exp r = 1; r <= radius; ++r) {
    std::vector<TreeVertex> next;
    for (const auto& x : frontier)
      for (const auto& y : neighbors(x))
        if (dist.emplace(y.rep().signature(), r).second) next.push_back(y);
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

TEST(TreeDistance, Examples) {
  const FieldSpec f2(2);
  const TreeVertex l0 = TreeVertex::standard(f2);
  EXPECT_EQ(tree_distance(l0, l0), 0);
  EXPECT_EQ(tree_distance(l0, V(M(f2, {{"u", "0"}, {"0", "1"}}))), 1);
  EXPECT_EQ(tree_distance(l0, V(M(f2, {{"u^2", "0"}, {"0", "1"}}))), 2);
  EXPECT_EQ(V(M(f2, {{"u^3", "0"}, {"0", "u^3"}})), l0);
}

TEST(TreeDistance, MatchesGraphDistance) {
  for (int p : {2, 3}) {
    const FieldSpec f(p);
    const TreeVertex l0 = TreeVertex::standard(f);
    const auto dist = bfs(l0, 3);
    EXPECT_EQ(dist.size(), static_cast<std::size_t>(ball_size(f.q(), 3)));
    for (const auto& e : ball(l0, 3)) {
      EXPECT_EQ(dist.at(e.vertex.rep().signature()), e.distance);
      EXPECT_EQ(tree_distance(l0, e.vertex), e.distance);
      EXPECT_EQ(neighbors(e.vertex).size(), static_cast<std::size_t>(f.q() + 1));
      EXPECT_TRUE(e.vertex.detval() == 0 || e.vertex.detval() == 1);
    }
  }
}

TEST(PhiVertex, Examples) {
  const FieldSpec f2(2);
  const TreeVertex l0 = TreeVertex::standard(f2);
  EXPECT_EQ(phi_vertex(SeriesMatrix::identity(f2, 2), l0), l0);
  EXPECT_EQ(phi_vertex(M(f2, {{"u", "0"}, {"0", "u"}}), l0), l0);
  const TreeVertex x = V(M(f2, {{"u^-1", "0"}, {"0", "1"}}));
  EXPECT_EQ(phi_vertex(M(f2, {{"u", "0"}, {"0", "1"}}), x), x);
}

TEST(Displacement, Examples) {
  const FieldSpec f2(2);
  const TreeVertex l0 = TreeVertex::standard(f2);
  EXPECT_EQ(displacement(SeriesMatrix::identity(f2, 2), l0), 0);
  const SeriesMatrix d = M(f2, {{"u", "0"}, {"0", "1"}});
  EXPECT_EQ(displacement(d, l0), 1);
  const Coweight c = relative_position(l0.rep(), lattice_hnf(d));
  EXPECT_EQ(c[0] - c[1], 1);
  EXPECT_EQ(displacement(M(f2, {{"0", "1"}, {"u", "0"}}), l0), 1);
}

TEST(MinDisplacement, Examples) {
  const FieldSpec f2(2), f3(3);
  const auto s1 = min_displacement_search(M(f2, {{"u", "0"}, {"0", "1"}}), TreeVertex::standard(f2));
  EXPECT_EQ(s1.m_min, 0);
  EXPECT_EQ(s1.x_star, V(M(f2, {{"u^-1", "0"}, {"0", "1"}})));
  const TreeVertex start = V(M(f3, {{"u^2", "1"}, {"0", "1"}}));
  const auto s2 = min_displacement_search(SeriesMatrix::identity(f3, 2), start);
  EXPECT_EQ(s2.m_min, 0);
  EXPECT_EQ(s2.x_star, TreeVertex::standard(f3));
  const SeriesMatrix w = M(f2, {{"0", "1"}, {"u", "0"}});
  const auto s3 = min_displacement_search(w, TreeVertex::standard(f2));
  EXPECT_EQ(s3.m_min, 1);
  Exp best = 100;
  for (const auto& e : ball(TreeVertex::standard(f2), 4)) best = std::min(best, displacement(w, e.vertex));
  EXPECT_EQ(best, 1);
}

TEST(RankOneSubs, Examples) {
  const FieldSpec f2(2);
  const SeriesMatrix d = M(f2, {{"u", "0"}, {"0", "1"}});
  // diag(u,1) is conjugate to I, so besides the axes (1, u) is stable too
  EXPECT_EQ(rank_one_subs(d).lines.size(), 3u);
  const SeriesMatrix n = M(f2, {{"1", "u^-1"}, {"0", "1"}});
  const auto rn = rank_one_subs(n);
  ASSERT_EQ(rn.lines.size(), 1u);
  EXPECT_TRUE(rn.lines[0].v[1].is_zero());
  EXPECT_TRUE(rn.complete);
  const auto rw = rank_one_subs(M(f2, {{"0", "1"}, {"u", "0"}}));
  EXPECT_TRUE(rw.lines.empty());
  EXPECT_TRUE(rw.complete);
  for (const auto& L : rank_one_subs(d).lines) EXPECT_GE(L.certified, 32);
}

TEST(RankOneSubs, MatchesBruteForce) {
  const FieldSpec f2(2), f3(3);
  const std::vector<SeriesMatrix> cases{
      M(f2, {{"u", "0"}, {"0", "1"}}),   M(f2, {{"1", "u^-1"}, {"0", "1"}}), M(f2, {{"0", "1"}, {"u", "0"}}),
      M(f2, {{"u", "0"}, {"0", "u"}}),   SeriesMatrix::identity(f2, 2),      SeriesMatrix::identity(f3, 2),
      M(f3, {{"u", "1"}, {"0", "u^2"}}), M(f3, {{"0", "1"}, {"u", "0"}}),
  };
  for (const auto& a : cases) EXPECT_EQ(rank_one_subs(a).lines.size(), testsupport::brute_force_lines(a, -3, 3));
}

TEST(Classify, Examples) {
  const FieldSpec f2(2);
  const auto c1 = classify(M(f2, {{"u", "0"}, {"0", "1"}}));
  EXPECT_EQ(c1.tree_case, TreeCase::B2);
  EXPECT_EQ(c1.s, 0);
  EXPECT_EQ(c1.link_fixed_count, 3u);
  EXPECT_EQ(c1.module_type, ModuleType::Decomposable);
  const auto c2 = classify(M(f2, {{"1", "u^-1"}, {"0", "1"}}));
  EXPECT_EQ(c2.module_type, ModuleType::NonSplit);
  const auto c3 = classify(M(f2, {{"0", "1"}, {"u", "0"}}));
  EXPECT_EQ(c3.tree_case, TreeCase::A1);
  EXPECT_EQ(c3.module_type, ModuleType::Simple);
  EXPECT_EQ(c3.scan.m_min, 1);
}

TEST(Classify, LinkCountOverF4) {
  const FieldSpec f4 = FieldSpec(2, {1, 1, 1});
  // the reduction [[0,1],[1,1]] has no eigenvalue in F_2 but two in F_4
  const auto c = classify(M(f4, {{"0", "1"}, {"1", "1"}}));
  EXPECT_EQ(c.tree_case, TreeCase::B2);
  EXPECT_EQ(c.link_fixed_count, 2u);
  const FieldSpec f2(2);
  const auto c2 = classify(M(f2, {{"0", "1"}, {"1", "1"}}));
  EXPECT_EQ(c2.link_fixed_count, 0u);
  EXPECT_EQ(c2.module_type, ModuleType::NotAbsolutelySimple);
}

TEST(TreeLaws, Scaling) {
  for (int p : {2, 3}) {
    const FieldSpec f(p);
    const SeriesMatrix id = SeriesMatrix::identity(f, 2);
    const auto b = ball(TreeVertex::standard(f), 3);
    std::vector<TreeVertex> img;
    for (const auto& e : b) img.push_back(phi_vertex(id, e.vertex));
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i; j < b.size(); ++j)
        ASSERT_EQ(tree_distance(img[i], img[j]), p * tree_distance(b[i].vertex, b[j].vertex));
  }
}

TEST(TreeLaws, SandwichAndRadial) {
  std::vector<SeriesMatrix> suite;
  const FieldSpec f2(2), f3(3);
  suite.push_back(M(f2, {{"u", "0"}, {"0", "1"}}));
  suite.push_back(M(f2, {{"0", "1"}, {"u", "0"}}));
  suite.push_back(M(f2, {{"1", "u^-1"}, {"0", "1"}}));
  suite.push_back(M(f2, {{"u", "0"}, {"0", "u"}}));
  suite.push_back(SeriesMatrix::identity(f2, 2));
  std::mt19937_64 rng(73);
  for (int i = 0; i < 10; ++i) suite.push_back(testsupport::random_bounded(i % 2 ? f3 : f2, 2, rng, 1, 1));
  std::map<TreeCase, int> seen;
  for (const auto& a : suite) {
    const int p = a.field().p();
    const auto c = classify(a);
    ++seen[c.tree_case];
    if (c.tree_case == TreeCase::B2) {
      for (const auto& [x, m] : c.scan.ball) {
        const Exp t = tree_distance(x, *c.fixed_vertex);
        EXPECT_LE((p - 1) * t, m);
        EXPECT_LE(m, (p + 1) * t);
      }
    }
    if (c.tree_case == TreeCase::A1) {
      for (const auto& [x, m] : c.scan.ball) {
        if (m - (p + 1) < c.scan.m_min) continue;
        int down = 0;
        for (const auto& y : neighbors(x)) down += displacement(a, y) == m - (p + 1);
        EXPECT_EQ(down, 1);
      }
    }
  }
  EXPECT_GT(seen[TreeCase::B2], 0);
  EXPECT_GT(seen[TreeCase::A1], 0);
}
