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

#ifndef PSEUDOMAP__METRICS_HPP_
#define PSEUDOMAP__METRICS_HPP_

#include <array>
#include <cstddef>
#include <vector>

#include "pseudomap/assign.hpp"
#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap
{

struct ApConfig
{
  std::vector<double> thresholds{0.5, 1.0, 1.5};  // meters
  std::size_t n_samples = kDefaultChamferSamples;

  void validate() const;
  friend bool operator==(const ApConfig &, const ApConfig &) = default;
};

struct ClassReport
{
  std::vector<double> ap;  // per threshold
  double mean_ap = 0.0;
  std::vector<std::size_t> tp;
  std::vector<std::size_t> fp;
  std::vector<std::size_t> fn;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
};

struct EvalReport
{
  std::vector<double> thresholds;
  std::array<ClassReport, kNumMapClasses> classes;  // indexed by MapClass
  double mean_ap = 0.0;
};

/// All-point interpolated area under the precision-recall curve. `tp`
/// holds the match flags of the predictions in ranked order.
double average_precision(const std::vector<bool> & tp, std::size_t n_gt);

/// Chamfer AP. preds[k] and gts[k] describe the same frame. Predictions
/// without a confidence count as 1.0; equal confidences keep (frame,
/// element) order. A class without ground truth scores 1 when it also has
/// no predictions and 0 otherwise.
EvalReport chamfer_ap(const std::vector<VectorMap> & preds, const std::vector<VectorMap> & gts, const ApConfig & cfg);

double coverage_ratio(const BevMask & mask);

/// Fraction of masks with coverage strictly above each tau.
std::vector<double> coverage_curve(const std::vector<BevMask> & masks, const std::vector<double> & taus);

/// Observed part of the ground truth: elements are cut into their observed
/// runs (runs shorter than min_points spacings at L points are dropped).
/// Fully observed elements are kept as they are; partially observed
/// crossings become the polygon closing their observed arc.
VectorMap mask_gt(
  const VectorMap & gts, const BevMask & mask, std::size_t L = kDefaultElementPoints,
  std::size_t min_points = kMinRunPoints);

}  // namespace pseudomap

#endif  // PSEUDOMAP__METRICS_HPP_
