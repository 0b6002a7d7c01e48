#include <gtest/gtest.h>

#include <random>

#include "phimod/canonical.hpp"
#include "phimod/literal.hpp"
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

Coweight W(std::vector<Exp> v) { return Coweight(std::move(v)); }

}  // namespace

TEST(MatInverse, Examples) {
  const FieldSpec f2(2);
  EXPECT_EQ(mat_inverse(SeriesMatrix::identity(f2, 2)), SeriesMatrix::identity(f2, 2));
  EXPECT_EQ(mat_inverse(M(f2, {{"u", "0"}, {"0", "1"}})), M(f2, {{"u^-1", "0"}, {"0", "1"}}));
  EXPECT_EQ(mat_inverse(M(f2, {{"1", "1"}, {"0", "1"}})), M(f2, {{"1", "1"}, {"0", "1"}}));
  EXPECT_THROW(mat_inverse(M(f2, {{"1", "1"}, {"1", "1"}})), Singular);
  EXPECT_EQ(mat_inverse(M(f2, {{"u^2", "0"}, {"0", "u^-1"}})).pole_bound(), 2);
}

TEST(MatInverse, RandomTwoSided) {
  std::mt19937_64 rng(3);
  for (int p : {2, 3, 5}) {
    const FieldSpec f(p);
    for (int d = 1; d <= 3; ++d)
      for (int trial = 0; trial < 30; ++trial) {
        const SeriesMatrix a = testsupport::random_bounded(f, d, rng, 2);
        const SeriesMatrix ai = mat_inverse(a, 40);
        const SeriesMatrix id = SeriesMatrix::identity(f, d);
        EXPECT_TRUE((a * ai).agrees_to(id, (a * ai).prec()));
        EXPECT_TRUE((ai * a).agrees_to(id, (ai * a).prec()));
        EXPECT_GE((a * ai).prec(), 20);
      }
  }
}

TEST(Dominance, Examples) {
  EXPECT_TRUE(dominance_leq(W({1, 1}), W({2, 0})));
  EXPECT_TRUE(dominance_leq(W({1, 0}), W({1, 0})));
  EXPECT_TRUE(dominance_leq(W({1, 0}), W({2, -1})));
  EXPECT_FALSE(dominance_leq(W({2, -1}), W({1, 0})));
  EXPECT_FALSE(dominance_leq(W({1, 0}), W({1, 1})));
  EXPECT_EQ(W({-1, 2}).components(), (std::vector<Exp>{2, -1}));
  EXPECT_EQ(W({3, 1, 0}).dual(), W({0, -1, -3}));
  EXPECT_EQ(W({3, 1, 0}).dual().dual(), W({3, 1, 0}));
  EXPECT_EQ(Coweight::parse("1,0"), W({1, 0}));
  EXPECT_EQ(Coweight::parse("(2,-1)").str(), "(2,-1)");
  EXPECT_THROW(Coweight::parse("1,x"), ParseError);
}

TEST(CartanType, Examples) {
  const FieldSpec f2(2);
  EXPECT_EQ(cartan_type(M(f2, {{"u^2", "0"}, {"0", "u^-1"}})), W({2, -1}));
  EXPECT_EQ(cartan_type(M(f2, {{"0", "u"}, {"u^3", "0"}})), W({3, 1}));
  const SeriesMatrix b = M(f2, {{"1", "1"}, {"0", "u^2"}});
  EXPECT_EQ(cartan_type(b), W({2, 0}));
  EXPECT_EQ(cartan_type(b).components(), testsupport::cartan_by_minors(b));
}

TEST(CartanType, InsufficientPrecision) {
  const FieldSpec f2(2);
  // after clearing u^2 the (0,0) entry carries no information at all
  EXPECT_THROW(cartan_type(M(f2, {{"O(u^2)", "u^2"}, {"u^2", "u^2"}})), InsufficientPrecision);
  EXPECT_EQ(cartan_type(M(f2, {{"u^3+O(u^2)", "1"}, {"1", "1"}})), W({0, 0}));
  EXPECT_THROW(cartan_type(M(f2, {{"1", "1"}, {"1", "1"}})), Singular);
}

TEST(CartanType, AgreesWithMinorsOracle) {
  std::mt19937_64 rng(17);
  for (int p : {2, 3}) {
    const FieldSpec f(p);
    for (int d = 1; d <= 3; ++d)
      for (int trial = 0; trial < 40; ++trial) {
        const SeriesMatrix b = testsupport::random_bounded(f, d, rng, 3);
        EXPECT_EQ(cartan_type(b).components(), testsupport::cartan_by_minors(b));
      }
  }
}

TEST(CartanType, InvarianceDualityTotal) {
  std::mt19937_64 rng(23);
  for (int p : {2, 3, 5}) {
    const FieldSpec f(p);
    for (int d = 1; d <= 3; ++d)
      for (int trial = 0; trial < 30; ++trial) {
        const SeriesMatrix b = testsupport::random_bounded(f, d, rng, 2);
        const Coweight nu = cartan_type(b);
        const SeriesMatrix g = testsupport::random_integral_unit(f, d, rng);
        const SeriesMatrix h = testsupport::random_integral_unit(f, d, rng);
        EXPECT_EQ(cartan_type(g * b * h), nu);
        EXPECT_EQ(cartan_type(mat_inverse(b)), nu.dual());
        EXPECT_EQ(nu.total(), det(b).val());
      }
  }
}

TEST(LatticeHnf, Examples) {
  const FieldSpec f2(2);
  const Lattice l = lattice_hnf(M(f2, {{"u", "u"}, {"0", "1"}}));
  EXPECT_EQ(l.basis(), M(f2, {{"u", "0"}, {"0", "1"}}));
  EXPECT_EQ(l.diagonal(), (std::vector<Exp>{1, 0}));
  EXPECT_EQ(testsupport::lattice_image(l.basis(), 0, 3), testsupport::lattice_image(M(f2, {{"u", "u"}, {"0", "1"}}), 0, 3));
  EXPECT_EQ(lattice_hnf(SeriesMatrix::identity(f2, 3)), Lattice::standard(f2, 3));
  EXPECT_THROW(lattice_hnf(M(f2, {{"1", "1"}, {"1", "1"}})), Singular);
}

TEST(LatticeHnf, CanonicalUnderRightUnits) {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int p : {2, 3}) {
    const FieldSpec f(p);
    for (int d = 2; d <= 3; ++d)
      for (int trial = 0; trial < 125; ++trial) {
        const SeriesMatrix g = testsupport::random_bounded(f, d, rng, 2);
        const SeriesMatrix k = testsupport::random_integral_unit(f, d, rng);
        const Lattice a = lattice_hnf(g);
        const Lattice b = lattice_hnf(g * k);
        EXPECT_EQ(a, b);
        EXPECT_EQ(lattice_hnf(a.basis()), a);
        EXPECT_EQ(a.detval(), det(g).val());
        // same span as the generators, checked in a box containing both
        const Exp lo = std::min<Exp>(g.val_bound(), a.basis().val_bound());
        const Exp hi = lo + 12;
        EXPECT_EQ(testsupport::lattice_image(a.basis(), lo, hi), testsupport::lattice_image(g, lo, hi));
        ++checked;
      }
  }
  EXPECT_EQ(checked, 500);
}

TEST(LatticeHnf, InverseBasisAndMembership) {
  std::mt19937_64 rng(31);
  const FieldSpec f(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Lattice l = lattice_hnf(testsupport::random_bounded(f, 3, rng, 2));
    const SeriesMatrix x = l.inverse_basis();
    EXPECT_TRUE(x.is_exact());
    EXPECT_EQ(l.basis() * x, SeriesMatrix::identity(f, 3));
    for (int j = 0; j < 3; ++j) EXPECT_TRUE(l.contains(l.basis().column(j)));
    EXPECT_TRUE(l.contains_lattice(l.scaled(1)));
    EXPECT_FALSE(l.contains_lattice(l.scaled(-1)));
  }
}

TEST(RelativePosition, Examples) {
  const FieldSpec f2(2);
  const Lattice l0 = Lattice::standard(f2, 2);
  EXPECT_EQ(relative_position(l0, lattice_hnf(M(f2, {{"u^2", "0"}, {"0", "u"}}))), W({2, 1}));
  EXPECT_EQ(relative_position(l0, l0), W({0, 0}));
  EXPECT_EQ(relative_position(l0, lattice_hnf(M(f2, {{"1", "1"}, {"0", "u^2"}}))), W({2, 0}));
}
