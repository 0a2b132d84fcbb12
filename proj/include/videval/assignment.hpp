#pragma once

// Exact maximum-weight bipartite assignment (Kuhn-Munkres with potentials,
// O(n^3)). Rows and columns may differ in count and pairs may be ineligible;
// ineligible pairs are never matched and leaving a row or column unmatched is
// always allowed.

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace videval {

// Square-matrix minimization core: returns row -> column assignment.
inline std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("hungarian_min: matrix not square");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
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
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) result[p[j] - 1] = j - 1;
  return result;
}

struct AssignmentResult {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending by row
  double total = 0.0;
};

// Maximum-weight matching on an n x m weight matrix. eligible[i][j] == false
// removes the edge entirely. A pair with negative weight is left unmatched
// (an implicit zero-weight "stay single" option always exists).
inline AssignmentResult max_weight_assignment(const std::vector<std::vector<double>>& weight,
                                              const std::vector<std::vector<char>>& eligible) {
  const int n = static_cast<int>(weight.size());
  const int m = n == 0 ? 0 : static_cast<int>(weight[0].size());
  if (static_cast<int>(eligible.size()) != n)
    throw std::invalid_argument("max_weight_assignment: shape mismatch");
  AssignmentResult out;
  if (n == 0 || m == 0) return out;
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(weight[i].size()) != m || static_cast<int>(eligible[i].size()) != m)
      throw std::invalid_argument("max_weight_assignment: shape mismatch");

  // Pad to (n+m) x (n+m): row i can take dummy column m+i, column j dummy row
  // n+j, both at cost 0, so no ineligible edge is ever forced.
  const int s = n + m;
  double max_abs = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (eligible[i][j]) max_abs = std::max(max_abs, std::abs(weight[i][j]));
  const double kBlock = max_abs * (s + 1) * 4.0;  // dominates any real total

  std::vector<std::vector<double>> cost(s, std::vector<double>(s, kBlock));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      cost[i][j] = eligible[i][j] ? -weight[i][j] : kBlock;
  for (int i = 0; i < n; ++i) cost[i][m + i] = 0.0;
  for (int j = 0; j < m; ++j) cost[n + j][j] = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) cost[n + i][m + j] = 0.0;

  std::vector<int> assign = hungarian_min(cost);
  for (int i = 0; i < n; ++i) {
    int j = assign[i];
    if (j >= 0 && j < m && eligible[i][j] && weight[i][j] >= 0.0) {
      out.pairs.emplace_back(i, j);
      out.total += weight[i][j];
    }
  }
  return out;
}

}  // namespace videval
