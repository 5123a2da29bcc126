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

#ifndef PSEUDOMAP__MAP_LOSSES_HPP_
#define PSEUDOMAP__MAP_LOSSES_HPP_

#include <optional>
#include <vector>

#include "pseudomap/assign.hpp"
#include "pseudomap/loss.hpp"

namespace pseudomap
{

enum class DirectionLossKind
{
  kTurningAngle,
  kNone,
};

struct LossParams
{
  LossWeights weights;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  SoftRasterParams raster;
  DirectionLossKind direction = DirectionLossKind::kTurningAngle;

  void validate() const;
  friend bool operator==(const LossParams &, const LossParams &) = default;
};

/// Index of the background entry in a prediction's class vector.
inline constexpr int kBackgroundClass = kNumMapClasses;

/// Class vector of a prediction: its confidence on its own class and the
/// remainder split evenly over the other classes and background.
std::vector<double> class_probabilities(const MapElement & q);

/// Predictions that take part in the loss: matched one-to-one, or with at
/// least one observed subsegment.
std::vector<bool> active_predictions(const AssignmentResult & assignment, const std::vector<Subsegments> & splits);

/// Externally supplied BEV segmentation prediction and its label.
struct BevSegInput
{
  SoftRaster pred;
  BinaryGrid label;
};

/// Loss terms over the mask-aware assignment:
///  cls  - focal loss summed over active predictions; unassigned ones are
///         pushed toward background;
///  pt   - point-wise L1 summed over one-to-one matches;
///  rend - masked render loss averaged over assigned active predictions;
///  dir  - direction loss averaged over assigned active predictions;
///  bev_seg - masked BEV segmentation loss when `bev` is given.
/// Predictions and labels are brought to `L` points first (see
/// standardize); point gradients refer to those points.
LossBreakdown compute_map_losses(
  const std::vector<MapElement> & predictions, const std::vector<MapElement> & labels, const BevMask & mask,
  const AssignmentResult & assignment, const LossParams & params, std::size_t L = kDefaultElementPoints,
  const std::optional<BevSegInput> & bev = std::nullopt);

}  // namespace pseudomap

#endif  // PSEUDOMAP__MAP_LOSSES_HPP_
