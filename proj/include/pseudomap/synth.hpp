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

#ifndef PSEUDOMAP__SYNTH_HPP_
#define PSEUDOMAP__SYNTH_HPP_

#include <cstdint>
#include <numbers>
#include <vector>

#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap
{

/// SplitMix64. Fixed algorithm so fixtures are reproducible anywhere.
class SplitMix64
{
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next()
  {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

struct DashPattern
{
  double on = 2.0;   // meters
  double off = 0.3;  // meters

  void validate() const;
  friend bool operator==(const DashPattern &, const DashPattern &) = default;
};

inline constexpr double kMarkingWidth = 0.15;  // meters

struct SceneParams
{
  std::uint64_t seed = 0;
  int n_lanes = 2;
  double lane_width = 3.5;   // meters
  double curvature = 0.0;    // 1/meters, positive bends right
  int n_crossings = 1;
  DashPattern dash;
  BevSpec spec;

  void validate() const;
  friend bool operator==(const SceneParams &, const SceneParams &) = default;
};

/// Corridor through the ego origin heading +y, with boundaries oriented so
/// that the road lies on their left.
VectorMap gen_scene(const SceneParams & params);

/// Road between boundaries (each with the road on its left), dashed
/// dividers, filled crossings, Outside elsewhere.
SemanticRaster rasterize_gt(const VectorMap & map, const BevSpec & spec, const DashPattern & dash);

struct OcclusionParams
{
  std::uint64_t seed = 0;
  int n_blobs = 0;
  double blob_radius_min = 1.0;  // meters
  double blob_radius_max = 3.0;  // meters
  double frustum_fov = 2.0 * std::numbers::pi;  // radians
  double frustum_range = 1e9;    // meters

  void validate() const;
  friend bool operator==(const OcclusionParams &, const OcclusionParams &) = default;
};

/// Observed = inside the view fan of `pose` (axis along the pose's +y) and
/// outside every blob disk.
BevMask gen_occlusion(const OcclusionParams & params, const Pose2 & pose, const BevSpec & spec);

/// Marks every pixel whose center lies within `radius` of `center` unobserved.
void occlude_disk(BevMask & mask, Point2 center, double radius);

/// Pixel-wise OR.
BevMask multi_trip_union(const std::vector<BevMask> & masks);

}  // namespace pseudomap

#endif  // PSEUDOMAP__SYNTH_HPP_
