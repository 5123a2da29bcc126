// Copyright 2026 The PseudoMap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pseudomap/hungarian.hpp"

#include <cmath>
#include <limits>

#include "pseudomap/error.hpp"

namespace pseudomap
{
namespace
{

// Rows <= cols. Classic O(n^2 m) potentials formulation, 1-based internally.
std::vector<int> solve_wide(const CostMatrix & a)
{
  const std::size_t n = a.rows;
  const std::size_t m = a.cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0);
  std::vector<std::size_t> way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a.at(i0 - 1, j - 1) - u[i0] - v[j];
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
  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) {
      row_to_col[p[j] - 1] = static_cast<int>(j - 1);
    }
  }
  return row_to_col;
}

}  // namespace

Matching hungarian(const CostMatrix & cost)
{
  require(cost.values.size() == cost.rows * cost.cols, "cost matrix has the wrong number of entries");
  for (double c : cost.values) {
    require(std::isfinite(c), "cost matrix entries must be finite");
  }
  Matching out;
  out.row_to_col.assign(cost.rows, -1);
  if (cost.rows == 0 || cost.cols == 0) {
    return out;
  }
  if (cost.rows <= cost.cols) {
    out.row_to_col = solve_wide(cost);
  } else {
    CostMatrix t(cost.cols, cost.rows);
    for (std::size_t r = 0; r < cost.rows; ++r) {
      for (std::size_t c = 0; c < cost.cols; ++c) {
        t.at(c, r) = cost.at(r, c);
      }
    }
    const std::vector<int> col_to_row = solve_wide(t);
    for (std::size_t c = 0; c < col_to_row.size(); ++c) {
      out.row_to_col[col_to_row[c]] = static_cast<int>(c);
    }
  }
  for (std::size_t r = 0; r < cost.rows; ++r) {
    if (out.row_to_col[r] >= 0) {
      out.total += cost.at(r, out.row_to_col[r]);
    }
  }
  return out;
}

}  // namespace pseudomap
