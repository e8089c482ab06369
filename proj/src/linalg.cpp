#include "nccalc/linalg.hpp"

namespace nccalc {

namespace {
void axpy(SparseRow& dst, const Scalar& f, const SparseRow& src) {
  for (auto& [c, v] : src) {
    auto it = dst.find(c);
    if (it == dst.end()) {
      dst.emplace(c, -(f * v));
    } else {
      it->second -= f * v;
      if (it->second.is_zero()) dst.erase(it);
    }
  }
}
}  // namespace

Echelon row_reduce(std::vector<SparseRow> input) {
  Echelon e;
  for (auto& row : input) {
    for (size_t i = 0; i < e.rows.size() && !row.empty(); ++i) {
      auto it = row.find(e.pivots[i]);
      if (it == row.end()) continue;
      Scalar f = it->second;
      axpy(row, f, e.rows[i]);
    }
    if (row.empty()) continue;
    int piv = row.rbegin()->first;
    Scalar inv = row.rbegin()->second.inverse();
    for (auto& [c, v] : row) v *= inv;
    for (size_t i = 0; i < e.rows.size(); ++i) {
      auto it = e.rows[i].find(piv);
      if (it == e.rows[i].end()) continue;
      Scalar f = it->second;
      axpy(e.rows[i], f, row);
    }
    e.rows.push_back(std::move(row));
    e.pivots.push_back(piv);
  }
  return e;
}

std::vector<std::vector<Scalar>> kernel(const std::vector<SparseRow>& rows, int ncols) {
  Echelon e = row_reduce(rows);
  std::map<int, size_t> pivot_row;
  for (size_t i = 0; i < e.pivots.size(); ++i) pivot_row[e.pivots[i]] = i;
  std::vector<std::vector<Scalar>> basis;
  for (int free = 0; free < ncols; ++free) {
    if (pivot_row.count(free)) continue;
    std::vector<Scalar> v(ncols);
    v[free] = Scalar(1);
    for (auto& [p, i] : pivot_row) {
      auto it = e.rows[i].find(free);
      if (it != e.rows[i].end()) v[p] = -it->second;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Scalar determinant(std::vector<std::vector<Scalar>> m) {
  size_t n = m.size();
  Scalar det(1);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) return Scalar(0);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    Scalar inv = m[col][col].inverse();
    for (size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      Scalar f = m[r][col] * inv;
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace nccalc
