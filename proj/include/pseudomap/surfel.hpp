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

#ifndef PSEUDOMAP__SURFEL_HPP_
#define PSEUDOMAP__SURFEL_HPP_

#include <array>
#include <vector>

#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap
{

/// Surfel class channels map to the observed raster classes Road,
/// Outside, LaneMarking and PedCrossing, in that order.
inline constexpr int kNumSurfelClasses = 4;

struct Surfel
{
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0};  // unit quaternion (w, x, y, z)
  std::array<double, 2> scale{0.5, 0.5};                // meters
  double opacity = 1.0;
  std::array<double, 3> color{0.5, 0.5, 0.5};
  std::array<double, kNumSurfelClasses> class_probs{0.25, 0.25, 0.25, 0.25};

  void validate() const;
  friend bool operator==(const Surfel &, const Surfel &) = default;
};

struct Trajectory
{
  std::vector<Pose2> poses;
  std::vector<double> timestamps;  // seconds

  void validate() const;
};

struct SurfelGrid
{
  std::vector<Surfel> surfels;
  double spacing = 1.0;
  std::vector<Pose2> source_trajectory;

  void validate() const;
  friend bool operator==(const SurfelGrid &, const SurfelGrid &) = default;
};

/// Lattice points k * spacing inside the union of the world-axis-aligned
/// squares [-r, r]^2 around each pose, ordered by (y index, x index).
SurfelGrid init_meshgrid(const Trajectory & traj, double offset_r, double spacing);

struct RenderParams
{
  double alpha_min = 0.05;
  double cutoff_sigma = 3.0;

  void validate() const;
  friend bool operator==(const RenderParams &, const RenderParams &) = default;
};

struct BevRender
{
  SemanticRaster raster;
  std::vector<std::array<double, 3>> color;  // row-major
  std::vector<double> alpha;                 // row-major
};

/// Orthographic top-down splatting in the ego frame of `pose`.
BevRender render_bev(const SurfelGrid & grid, const Pose2 & pose, const BevSpec & spec, const RenderParams & params = {});

/// Rigidly moves every surfel by T (world = T applied to the old world).
SurfelGrid transform_grid(const SurfelGrid & grid, const Pose2 & t);

/// Writes one-hot class probabilities read from `raster` (expressed in the
/// ego frame of `pose`) into the surfels; surfels over Unobserved pixels or
/// outside the raster become transparent. A stand-in for the photometric
/// optimisation that normally fits the surfels.
void paint_surfels(SurfelGrid & grid, const SemanticRaster & raster, const Pose2 & pose);

}  // namespace pseudomap

#endif  // PSEUDOMAP__SURFEL_HPP_
