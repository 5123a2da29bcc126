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

#ifndef PSEUDOMAP__RASTER_POST_HPP_
#define PSEUDOMAP__RASTER_POST_HPP_

#include <cstdint>
#include <vector>

#include "pseudomap/raster.hpp"

namespace pseudomap
{

/// 8-connected component labeling. Labels are 1..count in raster-scan
/// order of each component's first pixel; 0 is background.
struct Components
{
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;
  std::vector<int> areas;  // areas[label - 1]

  int count() const { return static_cast<int>(areas.size()); }
  std::int32_t label(int r, int c) const { return labels[static_cast<std::size_t>(r) * width + c]; }
};

Components connected_components(const BinaryGrid & grid);
Components connected_components(const SemanticRaster & raster, RasterClass cls);

struct ArtifactParams
{
  int min_area = 50;    // pixels
  int thick_max = 12;   // pixels, largest inscribed width of a lane marking
  friend bool operator==(const ArtifactParams &, const ArtifactParams &) = default;
};

/// Reassigns small components (area < min_area) to their enclosing class,
/// or to the majority adjacent class when several touch them (ties go to
/// Unobserved). Lane markings thicker than thick_max become Road.
SemanticRaster remove_artifacts(const SemanticRaster & raster, const ArtifactParams & params);

enum class MorphMode
{
  kDilate,
  kErode,
  kOpen,
  kClose,
};

/// Binary morphology; pixels outside the grid count as background.
BinaryGrid morphology(const BinaryGrid & grid, const StructuringElement & element, MorphMode mode);

/// Road pixels 8-adjacent to the Outside class after smoothing Outside
/// with an opening followed by a closing.
BinaryGrid extract_boundary(const SemanticRaster & raster, const StructuringElement & smoothing);

/// Dilates lane markings, keeping only growth that lands on Road or
/// LaneMarking pixels.
BinaryGrid connect_lane_fragments(
  const BinaryGrid & lanes, const SemanticRaster & raster, const StructuringElement & element);

/// Zhang-Suen thinning to a fixpoint, followed by removal of redundant
/// staircase corners. Never deletes a whole component.
BinaryGrid skeletonize(const BinaryGrid & grid);

/// Grows the raster by `margin_px` on each side, replicating edge pixels.
SemanticRaster extend_margin(const SemanticRaster & raster, int margin_px);
/// Inverse of extend_margin.
SemanticRaster crop_margin(const SemanticRaster & raster, int margin_px, const BevSpec & inner);

}  // namespace pseudomap

#endif  // PSEUDOMAP__RASTER_POST_HPP_
