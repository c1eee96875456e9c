#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace multimatch {

inline constexpr std::ptrdiff_t kUnassigned = -1;

// Maximum-weight assignment on a dense rows x cols matrix of nonnegative
// weights (row-major). Shortest augmenting paths with vertex potentials,
// O(min^2 * max). Returns, per row, the assigned column or kUnassigned; every
// pair of the optimal assignment is reported, including zero-weight ones.
std::vector<std::ptrdiff_t> max_weight_assignment(std::size_t rows, std::size_t cols,
                                                  std::span<const double> weights);

}  // namespace multimatch
