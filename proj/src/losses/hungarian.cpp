#include "opd/losses/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opd/core/error.hpp"

namespace opd {

namespace {

// Requires rows <= cols. Returns col index per row.
std::vector<std::size_t> solve(const Eigen::MatrixXd& a) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t m = static_cast<std::size_t>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
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
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
  }
  return col_of_row;
}

// Optimal min(|rows|, |cols|)-pair cost restricted to the given index sets.
double restricted_optimum(const Eigen::MatrixXd& cost, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  const bool transpose = rows.size() > cols.size();
  const std::size_t n = transpose ? cols.size() : rows.size();
  const std::size_t m = transpose ? rows.size() : cols.size();
  Eigen::MatrixXd work(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t r = transpose ? rows[j] : rows[i];
      const std::size_t c = transpose ? cols[i] : cols[j];
      work(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  const std::vector<std::size_t> assigned = solve(work);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += work(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(assigned[i]));
  }
  return total;
}

}  // namespace

Assignment hungarian_match(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) throw Error("cost matrix contains NaN or infinite entries");
  Assignment out;
  if (cost.rows() == 0 || cost.cols() == 0) return out;
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  const std::size_t m = static_cast<std::size_t>(cost.cols());
  const std::size_t k = std::min(n, m);

  std::vector<std::size_t> all_rows(n), all_cols(m);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  for (std::size_t j = 0; j < m; ++j) all_cols[j] = j;
  const double best = restricted_optimum(cost, all_rows, all_cols);
  const double tol = 1e-9 * std::max(1.0, std::abs(best));

  // Build the lexicographically smallest optimal pair list one pair at a
  // time: a candidate is kept when the remaining rows and columns can still
  // complete it at optimal cost.
  std::vector<bool> col_used(m, false);
  double prefix_cost = 0.0;
  std::size_t next_row = 0;
  while (out.pairs.size() < k) {
    bool placed = false;
    for (std::size_t r = next_row; r < n && !placed; ++r) {
      std::vector<std::size_t> rest_rows;
      for (std::size_t i = r + 1; i < n; ++i) rest_rows.push_back(i);
      for (std::size_t c = 0; c < m && !placed; ++c) {
        if (col_used[c]) continue;
        std::vector<std::size_t> rest_cols;
        for (std::size_t j = 0; j < m; ++j) {
          if (!col_used[j] && j != c) rest_cols.push_back(j);
        }
        const std::size_t needed = k - out.pairs.size() - 1;
        if (std::min(rest_rows.size(), rest_cols.size()) != needed) continue;
        const double here = cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        const double total = prefix_cost + here + restricted_optimum(cost, rest_rows, rest_cols);
        if (total <= best + tol) {
          out.pairs.emplace_back(r, c);
          col_used[c] = true;
          prefix_cost += here;
          next_row = r + 1;
          placed = true;
        }
      }
    }
    if (!placed) throw Error("assignment search failed to complete");
  }
  for (const auto& [r, c] : out.pairs) {
    out.total_cost += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

}  // namespace opd
