#include "hoiforge/hungarian.hpp"

#include <algorithm>
#include <limits>

#include "hoiforge/error.hpp"

namespace hoiforge {

namespace {

// Requires rows <= cols. Returns, for each row, its assigned column.
std::vector<std::size_t> solve_wide(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    // Flip the augmenting path.
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) col_of_row[owner[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

Assignment hungarian(const Matrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) throw ArgumentError("hungarian: empty cost matrix");
  if (!cost.all_finite()) throw ArgumentError("hungarian: non-finite cost");

  Assignment out;
  if (cost.rows() <= cost.cols()) {
    const auto cols = solve_wide(cost);
    for (std::size_t i = 0; i < cols.size(); ++i) out.pairs.emplace_back(i, cols[i]);
  } else {
    const auto rows = solve_wide(cost.transposed());
    for (std::size_t j = 0; j < rows.size(); ++j) out.pairs.emplace_back(rows[j], j);
    std::sort(out.pairs.begin(), out.pairs.end());
  }
  out.total_cost = assignment_cost(cost, out);
  return out;
}

double assignment_cost(const Matrix& cost, const Assignment& a) {
  double total = 0.0;
  for (const auto& [i, j] : a.pairs) total += cost(i, j);
  return total;
}

}  // namespace hoiforge
