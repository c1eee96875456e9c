#include "multimatch/assignment.hpp"

#include <algorithm>
#include <limits>

#include "multimatch/errors.hpp"

namespace multimatch {

namespace {

// Min-cost assignment of every row (rows <= cols); cost(i, j) 0-based.
template <typename Cost>
std::vector<std::ptrdiff_t> solve_min_cost(std::size_t rows, std::size_t cols, Cost cost) {
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual start.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> owner(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> minv(cols + 1);
  std::vector<char> used(cols + 1);
  for (std::size_t i = 1; i <= rows; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::ptrdiff_t> row_to_col(rows, kUnassigned);
  for (std::size_t j = 1; j <= cols; ++j)
    if (owner[j] != 0) row_to_col[owner[j] - 1] = static_cast<std::ptrdiff_t>(j - 1);
  return row_to_col;
}

}  // namespace

std::vector<std::ptrdiff_t> max_weight_assignment(std::size_t rows, std::size_t cols,
                                                  std::span<const double> weights) {
  if (weights.size() != rows * cols) throw ContractError("max_weight_assignment: matrix size mismatch");
  if (rows == 0 || cols == 0) return std::vector<std::ptrdiff_t>(rows, kUnassigned);
  // With nonnegative weights a full assignment of the smaller side is optimal.
  if (rows <= cols)
    return solve_min_cost(rows, cols, [&](std::size_t i, std::size_t j) { return -weights[i * cols + j]; });
  auto col_to_row =
      solve_min_cost(cols, rows, [&](std::size_t i, std::size_t j) { return -weights[j * cols + i]; });
  std::vector<std::ptrdiff_t> row_to_col(rows, kUnassigned);
  for (std::size_t c = 0; c < cols; ++c)
    if (col_to_row[c] != kUnassigned) row_to_col[static_cast<std::size_t>(col_to_row[c])] = static_cast<std::ptrdiff_t>(c);
  return row_to_col;
}

}  // namespace multimatch
