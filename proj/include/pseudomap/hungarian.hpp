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

#ifndef PSEUDOMAP__HUNGARIAN_HPP_
#define PSEUDOMAP__HUNGARIAN_HPP_

#include <cstddef>
#include <vector>

namespace pseudomap
{

/// Dense row-major cost matrix.
struct CostMatrix
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double & at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct Matching
{
  /// row_to_col[r] is the matched column, or -1 when r is unmatched
  /// (only possible when rows > cols).
  std::vector<int> row_to_col;
  double total = 0.0;  // sum of matched entries, accumulated in row order
};

/// Minimum-cost matching of min(rows, cols) pairs (shortest augmenting
/// paths with potentials). Deterministic: equal inputs give equal outputs.
Matching hungarian(const CostMatrix & cost);

}  // namespace pseudomap

#endif  // PSEUDOMAP__HUNGARIAN_HPP_
