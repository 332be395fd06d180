#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hoiforge/matrix.hpp"

namespace hoiforge {

/// One-to-one pairing of prediction rows with ground-truth columns.
struct Assignment {
  /// (prediction index, ground-truth index), ascending by prediction index.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

/// Minimum-cost assignment of size min(N, M) on an N x M cost matrix
/// (shortest augmenting paths with row/column potentials, O(n^2 m)).
/// Throws ArgumentError on an empty or non-finite matrix.
Assignment hungarian(const Matrix& cost);

/// Sum of cost(i, j) over the pairs.
double assignment_cost(const Matrix& cost, const Assignment& a);

}  // namespace hoiforge
