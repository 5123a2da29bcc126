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

#ifndef PSEUDOMAP__ASSIGN_HPP_
#define PSEUDOMAP__ASSIGN_HPP_

#include <cstddef>
#include <limits>
#include <vector>

#include "pseudomap/geometry.hpp"
#include "pseudomap/hungarian.hpp"
#include "pseudomap/loss.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap
{

inline constexpr std::size_t kMinRunPoints = 4;  // L_m
inline constexpr std::size_t kDefaultElementPoints = 20;

/// Resamples to L points unless the element already has exactly L, so that
/// model outputs keep their own vertices.
MapElement standardize(const MapElement & element, std::size_t L);

/// A maximal observed stretch of an element. Points are the first and last
/// observed samples plus the original vertices in between.
struct ObservedRun
{
  std::vector<Point2> points;
  bool whole_ring = false;  // the entire closed ring is observed
};

/// Observed runs of an element at the original resolution of L points.
/// Runs spanning fewer than `min_points` original point spacings are
/// dropped.
std::vector<ObservedRun> observed_runs(
  const MapElement & element, const BevMask & mask, std::size_t L = kDefaultElementPoints,
  std::size_t min_points = kMinRunPoints);

struct Subsegments
{
  std::size_t prediction_index = 0;
  /// Each exactly L points. A fully observed polygon stays a polygon;
  /// everything else is an open polyline of the prediction's class.
  std::vector<MapElement> segments;
};

Subsegments split_by_mask(
  const MapElement & q, const BevMask & mask, std::size_t L = kDefaultElementPoints,
  std::size_t min_points = kMinRunPoints);

struct CostParams
{
  double w_cls = 2.0;
  double w_pt = 5.0;
  double w_rend = 1.0;
  SoftRasterParams raster;
  double raster_resolution = 5.0;  // pixels per meter for the rendering cost
  double large_cost = 1e9;

  void validate() const;
  friend bool operator==(const CostParams &, const CostParams &) = default;
};

/// Costs are rounded to multiples of 2^-20 so that sums of a handful of
/// them are exact and independent of summation order.
double snap_cost(double c);

/// Unmasked Dice distance between the soft rasters of a and b on a local
/// window of the global lattice at params.raster_resolution; the kernel is
/// cut off at 4 sigma.
double render_cost(const MapElement & a, const MapElement & b, const CostParams & params);

/// Mean L1 point distance under the best equivalent ordering of g.
double point_cost(const MapElement & q, const MapElement & g);

double cost_o2o(const MapElement & q, const MapElement & g, const CostParams & params);

struct LocalMatch
{
  double cost = 0.0;
  std::vector<int> label_of_segment;  // position in J for each segment
};

/// Hungarian over segments x labels when |S| == |J|, large_cost otherwise.
LocalMatch cost_o2m(
  const Subsegments & s, const std::vector<MapElement> & labels, const std::vector<int> & subset, const CostParams & params);

inline constexpr double kUngated = std::numeric_limits<double>::infinity();

/// Same-class label subsets with 1 <= |J| <= max_card whose members are
/// pairwise within `gate` meters (bounding-box gap). Ordered by size, then
/// lexicographically. Throws Error(kBudgetExceeded) beyond `budget`.
std::vector<std::vector<int>> enumerate_subsets(
  const std::vector<MapElement> & labels, std::size_t max_card, double gate, std::size_t budget);

enum class Outcome
{
  kUnassigned,
  kOneToOne,
  kOneToMany,
};

struct PredictionAssignment
{
  Outcome outcome = Outcome::kUnassigned;
  std::vector<int> labels;  // ascending
  std::vector<int> local;   // label index per subsegment (one-to-many only)
  double cost = 0.0;
};

struct AssignmentResult
{
  std::vector<PredictionAssignment> predictions;
  double total_cost = 0.0;
};

enum class SolveMode
{
  kAuto,       // Hungarian fast path when every |S^i| <= 1, else ILP
  kIlp,
  kHungarian,  // fast path only; fails when some |S^i| > 1
};

struct AssignParams
{
  CostParams cost;
  std::size_t L = kDefaultElementPoints;
  std::size_t min_points = kMinRunPoints;
  std::size_t max_card = 0;  // 0 = min(max_i |S^i|, 4)
  double gate = 5.0;         // meters; kUngated disables gating
  std::size_t budget = 200000;
  SolveMode mode = SolveMode::kAuto;

  void validate() const;
  friend bool operator==(const AssignParams &, const AssignParams &) = default;
};

/// Precomputed inputs of the global problem.
struct AssignmentProblem
{
  std::vector<MapElement> predictions;  // resampled to L
  std::vector<MapElement> labels;       // resampled to L
  std::vector<Subsegments> splits;
  CostMatrix o2o;                       // predictions x labels, snapped
};

AssignmentProblem build_problem(
  const std::vector<MapElement> & predictions, const std::vector<MapElement> & labels, const BevMask & mask,
  const AssignParams & params);

/// Branch-and-bound over the binary program: every label covered exactly
/// once, every prediction used at most once.
AssignmentResult solve_ilp(const AssignmentProblem & problem, const AssignParams & params);

/// Fast path: pads the labels with zero-cost null columns and runs the
/// Hungarian algorithm. Requires every |S^i| <= 1.
AssignmentResult solve_padded_hungarian(const AssignmentProblem & problem, const AssignParams & params);

/// Throws Error(kInsufficientPredictions) when no feasible assignment
/// exists and Error(kBudgetExceeded) when subset enumeration overflows.
AssignmentResult solve_global(
  const std::vector<MapElement> & predictions, const std::vector<MapElement> & labels, const BevMask & mask,
  const AssignParams & params);

/// Recomputes the objective of an assignment from its recorded costs.
void check_assignment(const AssignmentResult & result, std::size_t n_labels);

}  // namespace pseudomap

#endif  // PSEUDOMAP__ASSIGN_HPP_
