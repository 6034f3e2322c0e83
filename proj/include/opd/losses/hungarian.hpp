#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace opd {

struct Assignment {
  // (row, col) pairs sorted by row; min(rows, cols) entries.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0;  // summed in row order
};

// Minimum-cost one-to-one assignment for a rectangular cost matrix, solved
// with shortest augmenting paths and dual potentials. Among optimal
// assignments (costs equal within a relative 1e-9) the one whose sorted pair
// list is lexicographically smallest is returned. Throws Error on non-finite
// costs.
Assignment hungarian_match(const Eigen::MatrixXd& cost);

}  // namespace opd
