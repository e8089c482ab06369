#pragma once

#include <map>
#include <vector>

#include "nccalc/scalar.hpp"

namespace nccalc {

using SparseRow = std::map<int, Scalar>;

/// Row-reduced echelon form over Q(params). Rows are reduced in place;
/// returns pivot column per surviving row. Pivots are taken at the largest
/// column index of each row so that callers can control elimination order.
struct Echelon {
  std::vector<SparseRow> rows;  // each row has pivot coefficient 1
  std::vector<int> pivots;
};

Echelon row_reduce(std::vector<SparseRow> rows);

/// Basis of {v : row·v = 0 for all rows}, over columns [0, ncols).
std::vector<std::vector<Scalar>> kernel(const std::vector<SparseRow>& rows, int ncols);

/// Determinant of a dense square matrix by Gaussian elimination.
Scalar determinant(std::vector<std::vector<Scalar>> m);

}  // namespace nccalc
