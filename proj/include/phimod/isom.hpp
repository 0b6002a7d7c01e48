#pragma once

// Isomorphism of phi-modules: solve g = B phi(g) A^{-1}, so that
// A = g^{-1} B phi(g), with g's poles bounded by T = floor((m + n')/(p - 1)).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "phimod/errors.hpp"
#include "phimod/linalg.hpp"
#include "phimod/phimodule.hpp"

namespace phimod {

enum class Verdict { Isomorphic, NonIsomorphic, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Isomorphic: return "Isomorphic";
    case Verdict::NonIsomorphic: return "NonIsomorphic";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

struct IsomReport {
  Verdict verdict = Verdict::Undecided;
  std::optional<SeriesMatrix> witness;  // g with g^{-1} B phi(g) = A
  std::string detail;                   // obstruction or reason
  Exp residual_prec = 0;
  Exp pole_bound = 0;                   // T
  std::size_t solution_dim = 0;
  std::size_t candidates_tried = 0;
  bool exhaustive = false;
};

struct IsomOptions {
  Exp prec = kDefaultPrecision;
  std::uint64_t candidate_limit = 4096;
  std::uint64_t seed = 1;
};

namespace detail {

// Coefficient tensor S_s[row][r][c][col] = coefficient of u^s in B(row,r) Ainv(c,col).
class CoefficientTensor {
 public:
  CoefficientTensor(const SeriesMatrix& b, const SeriesMatrix& a_inv) : d_(b.d()) {
    for (int row = 0; row < d_; ++row)
      for (int r = 0; r < d_; ++r)
        for (int c = 0; c < d_; ++c)
          for (int col = 0; col < d_; ++col) prods_.push_back(b(row, r) * a_inv(c, col));
    prec_ = kExact;
    for (const auto& x : prods_) prec_ = std::min(prec_, x.prec());
  }

  Exp prec() const noexcept { return prec_; }

  Elem at(Exp s, int row, int r, int c, int col) const {
    const LaurentSeries& x = prods_[static_cast<std::size_t>(((row * d_ + r) * d_ + c) * d_ + col)];
    if (x.is_zero() || s < x.start() || s >= x.end()) return 0;
    return x.coeffs()[static_cast<std::size_t>(s - x.start())];
  }

 private:
  int d_;
  std::vector<LaurentSeries> prods_;
  Exp prec_;
};

}  // namespace detail

inline IsomReport isom_test(const SeriesMatrix& A, const SeriesMatrix& B, const IsomOptions& opt = {}) {
  if (!(A.field() == B.field())) throw FieldMismatch();
  if (A.d() != B.d()) throw ValidationError("dimension mismatch");
  const FieldSpec& f = A.field();
  const int p = f.p();
  const int d = A.d();
  IsomReport rep;

  const Exp vA = det(A).val(), vB = det(B).val();
  const Exp mod = p - 1;
  if ((vA - vB) % mod != 0) {
    rep.verdict = Verdict::NonIsomorphic;
    rep.detail = "det-valuation class " + std::to_string(((vA % mod) + mod) % mod) + " ≠ " +
                 std::to_string(((vB % mod) + mod) % mod) + " mod (p-1)";
    return rep;
  }
  const Exp vg = (vA - vB) / mod;

  const Exp m = lg_bound(A, opt.prec), n = lg_bound(B, opt.prec);
  const Exp T = (m + n) / mod;
  rep.pole_bound = T;
  const Exp W = opt.prec;
  const Exp s_max = W + p * T + m + n + 1;
  const SeriesMatrix a_inv = mat_inverse(A, s_max + n + d * m + 8);
  const detail::CoefficientTensor S(B, a_inv);
  if (S.prec() <= s_max) throw InsufficientPrecision("inputs not certified far enough for the isomorphism system");

  // Linear unknowns: g_i[r][c] for -T <= i <= T, expanded over F_p when phi
  // moves coefficients (the system is then only F_p-linear).
  const bool semilinear = f.coeff_frobenius() && f.r() > 1;
  const FieldSpec lin = semilinear ? FieldSpec(p) : f;
  const int digits = semilinear ? f.r() : 1;
  std::vector<Elem> basis_elems;  // F_q value of the j-th F_p coordinate
  {
    Elem b = 1;
    for (int j = 0; j < digits; ++j) {
      basis_elems.push_back(b);
      b *= static_cast<Elem>(p);
    }
  }
  const std::size_t span = static_cast<std::size_t>(2 * T + 1);
  const std::size_t n_unknowns = span * d * d * digits;
  auto unk = [&](Exp i, int r, int c, int j) {
    return ((static_cast<std::size_t>(i + T) * d + r) * d + c) * digits + j;
  };
  std::vector<FqVector> rows;
  for (Exp a = -p * T - m - n; a <= T; ++a)
    for (int row = 0; row < d; ++row)
      for (int col = 0; col < d; ++col) {
        std::vector<FqVector> eq(static_cast<std::size_t>(digits), FqVector(n_unknowns, 0));
        bool any = false;
        for (Exp i = -T; i <= T; ++i)
          for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
              for (int j = 0; j < digits; ++j) {
                const Elem x = basis_elems[j];
                Elem val = f.neg(f.mul(S.at(a - p * i, row, r, c, col), f.phi(x)));
                if (a == i && r == row && c == col) val = f.add(val, x);
                if (!val) continue;
                any = true;
                if (semilinear) {
                  const auto ds = f.digits(val);
                  for (int k = 0; k < digits; ++k) eq[k][unk(i, r, c, j)] = static_cast<Elem>(ds[k]);
                } else {
                  eq[0][unk(i, r, c, j)] = val;
                }
              }
        if (any)
          for (auto& e : eq) rows.push_back(std::move(e));
      }
  const std::vector<FqVector> kernel = nullspace(lin, std::move(rows), n_unknowns);
  rep.solution_dim = kernel.size();
  if (kernel.empty()) {
    rep.verdict = Verdict::NonIsomorphic;
    rep.detail = "no solution of g = B*phi(g)*A^-1 with poles of order <= " + std::to_string(T);
    return rep;
  }

  // A solution vector -> g to working precision via the tail recursion.
  auto build = [&](const FqVector& y) {
    std::vector<std::vector<Elem>> coef(static_cast<std::size_t>(d * d), std::vector<Elem>(static_cast<std::size_t>(W + T), 0));
    auto g_at = [&](Exp i, int r, int c) -> Elem& {
      return coef[static_cast<std::size_t>(r * d + c)][static_cast<std::size_t>(i + T)];
    };
    for (Exp i = -T; i <= T && i < W; ++i)
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          Elem v = 0;
          for (int j = 0; j < digits; ++j) v = f.add(v, f.mul(y[unk(i, r, c, j)], basis_elems[j]));
          g_at(i, r, c) = v;
        }
    for (Exp a = T + 1; a < W; ++a)
      for (int row = 0; row < d; ++row)
        for (int col = 0; col < d; ++col) {
          Elem acc = 0;
          const Exp i_max = std::min<Exp>(a - 1, (a + m + n) / p + 1);
          for (Exp i = -T; i <= i_max; ++i)
            for (int r = 0; r < d; ++r)
              for (int c = 0; c < d; ++c) {
                const Elem gi = g_at(i, r, c);
                if (gi) acc = f.add(acc, f.mul(S.at(a - p * i, row, r, c, col), f.phi(gi)));
              }
          g_at(a, row, col) = acc;
        }
    SeriesMatrix g(f, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) g(r, c) = LaurentSeries::from_coeffs(f, -T, coef[static_cast<std::size_t>(r * d + c)], W);
    return g;
  };

  const Elem ql = lin.q();
  const std::size_t k = kernel.size();
  double total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= ql;
  rep.exhaustive = total - 1 <= static_cast<double>(opt.candidate_limit);
  bool uncertain = false;

  auto combine = [&](const std::vector<Elem>& coeffs) {
    FqVector y(n_unknowns, 0);
    for (std::size_t b = 0; b < k; ++b) {
      if (!coeffs[b]) continue;
      for (std::size_t t = 0; t < n_unknowns; ++t)
        if (kernel[b][t]) y[t] = lin.add(y[t], lin.mul(coeffs[b], kernel[b][t]));
    }
    return y;
  };

  auto try_candidate = [&](const std::vector<Elem>& coeffs) -> bool {
    ++rep.candidates_tried;
    const SeriesMatrix g = build(combine(coeffs));
    const LaurentSeries dg = det(g);
    if (dg.prec() <= vg) {
      uncertain = true;
      return false;
    }
    if (dg.coeff(vg) == 0) return false;
    const SeriesMatrix residual = mat_inverse(g, W) * B * apply_phi(g) - A;
    if (!residual.is_zero()) return false;
    Exp rp = kExact;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) rp = std::min(rp, residual(r, c).prec());
    rep.verdict = Verdict::Isomorphic;
    rep.witness = g;
    rep.residual_prec = rp;
    rep.detail.clear();
    return true;
  };

  std::vector<Elem> coeffs(k, 0);
  for (std::size_t b = 0; b < k; ++b) {
    std::fill(coeffs.begin(), coeffs.end(), 0);
    coeffs[b] = 1;
    if (try_candidate(coeffs)) return rep;
  }
  if (rep.exhaustive) {
    std::fill(coeffs.begin(), coeffs.end(), 0);
    while (true) {
      std::size_t pos = 0;
      while (pos < k && coeffs[pos] == ql - 1) coeffs[pos++] = 0;
      if (pos == k) break;
      ++coeffs[pos];
      const auto nz = std::count_if(coeffs.begin(), coeffs.end(), [](Elem x) { return x != 0; });
      if (nz == 1 && std::find(coeffs.begin(), coeffs.end(), Elem{1}) != coeffs.end()) continue;
      if (try_candidate(coeffs)) return rep;
    }
    if (!uncertain) {
      rep.verdict = Verdict::NonIsomorphic;
      rep.detail = "every solution of g = B*phi(g)*A^-1 with poles of order <= " + std::to_string(T) +
                   " is singular (solution space of dimension " + std::to_string(k) + " searched exhaustively)";
      return rep;
    }
  } else {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, ql - 1);
    while (rep.candidates_tried < opt.candidate_limit) {
      for (auto& x : coeffs) x = static_cast<Elem>(pick(rng));
      if (std::all_of(coeffs.begin(), coeffs.end(), [](Elem x) { return x == 0; })) continue;
      if (try_candidate(coeffs)) return rep;
    }
  }
  rep.verdict = Verdict::Undecided;
  rep.detail = "no invertible solution found among " + std::to_string(rep.candidates_tried) +
               " candidates; raise the precision or the candidate limit";
  return rep;
}

}  // namespace phimod
