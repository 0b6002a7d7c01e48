#pragma once

// Dense linear algebra over F_q.

#include <cstddef>
#include <vector>

#include "phimod/field.hpp"

namespace phimod {

using FqVector = std::vector<Elem>;

/// Basis of {x : M x = 0} for M given by rows of length `cols`.
/// The basis vectors have a 1 in one free column and 0 in the others.
inline std::vector<FqVector> nullspace(const FieldSpec& f, std::vector<FqVector> rows, std::size_t cols) {
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t sel = rank;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[rank], rows[sel]);
    const Elem inv = f.inv(rows[rank][c]);
    for (auto& x : rows[rank]) x = f.mul(x, inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      const Elem k = rows[r][c];
      for (std::size_t j = c; j < cols; ++j)
        if (rows[rank][j]) rows[r][j] = f.sub(rows[r][j], f.mul(k, rows[rank][j]));
    }
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  std::vector<FqVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    FqVector v(cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < rank; ++r) v[pivot_col[r]] = f.neg(rows[r][free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace phimod
