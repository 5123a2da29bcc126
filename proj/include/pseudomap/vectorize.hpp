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

#ifndef PSEUDOMAP__VECTORIZE_HPP_
#define PSEUDOMAP__VECTORIZE_HPP_

#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"
#include "pseudomap/raster_post.hpp"

namespace pseudomap
{

struct Pixel
{
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel &, const Pixel &) = default;
};

struct PixelPath
{
  std::vector<Pixel> pixels;
  bool closed = false;
};

inline constexpr int kMinBranchPixels = 4;

/// Splits a one-pixel-wide skeleton into paths. Each component contributes
/// its longest endpoint-to-endpoint path; the pixels left over form new
/// components that are traced the same way when they hold at least
/// `min_branch` pixels. Rings are opened at their smallest pixel.
std::vector<PixelPath> trace_lines(const BinaryGrid & skeleton, int min_branch = kMinBranchPixels);

/// Plain Ramer-Douglas-Peucker with fixed tolerance; keeps both endpoints.
std::vector<Point2> rdp(std::span<const Point2> points, double epsilon);

struct RdpResult
{
  std::vector<Point2> points;
  double epsilon = 0.0;  // tolerance of the accepted pass
};

/// Runs rdp with epsilon = eps1 * t for t = 1, 2, ... until at most
/// `max_points` points remain. Closed rings are split at the first vertex
/// and the vertex farthest from it.
RdpResult rdp_iterative(std::span<const Point2> points, double eps1, std::size_t max_points, bool closed = false);

/// Outer borders of every 8-connected component (Suzuki-Abe border
/// following). Hole borders are followed but not returned.
std::vector<PixelPath> trace_polygons(const BinaryGrid & grid);

struct DividerGate
{
  double distance = 0.5;                    // meters
  double angle = 10.0 * std::numbers::pi / 180.0;  // radians
  friend bool operator==(const DividerGate &, const DividerGate &) = default;
};

inline constexpr std::size_t kDividerFilterSamples = 50;

/// Drops dividers of which at least half the resampled points run close to
/// and parallel with a boundary or a crossing edge.
std::vector<MapElement> filter_dividers(
  const std::vector<MapElement> & dividers, const std::vector<MapElement> & boundaries,
  const std::vector<MapElement> & crossings, const DividerGate & gate);

struct VectorizeParams
{
  double eps1 = 0.05;       // meters
  std::size_t max_points = 20;
  StructuringElement lane_kernel{StructuringElement::Shape::kSquare, 15};
  StructuringElement boundary_kernel{StructuringElement::Shape::kDisk, 5};
  ArtifactParams artifacts;
  int min_branch = kMinBranchPixels;
  double min_length = 0.0;  // meters; shorter traced lines are dropped
  DividerGate gate;
  double margin = 2.0;      // meters

  void validate() const;
  friend bool operator==(const VectorizeParams &, const VectorizeParams &) = default;
};

struct VectorizeResult
{
  VectorMap map;
  BevMask mask;
};

VectorizeResult vectorize_bev(const SemanticRaster & raster, const VectorizeParams & params, const std::string & frame = "");

std::vector<Point2> pixels_to_points(const PixelPath & path, const BevSpec & spec);

}  // namespace pseudomap

#endif  // PSEUDOMAP__VECTORIZE_HPP_
