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

#include "pseudomap/raster.hpp"

#include <algorithm>
#include <string>

#include "pseudomap/error.hpp"

namespace pseudomap
{

std::string_view to_string(RasterClass cls)
{
  switch (cls) {
    case RasterClass::kUnobserved:
      return "unobserved";
    case RasterClass::kRoad:
      return "road";
    case RasterClass::kOutside:
      return "outside";
    case RasterClass::kLaneMarking:
      return "lane_marking";
    case RasterClass::kPedCrossing:
      return "ped_crossing";
  }
  return "unknown";
}

std::size_t BinaryGrid::count() const
{
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

SemanticRaster::SemanticRaster(const BevSpec & s, RasterClass fill)
: spec(s), width(s.width()), height(s.height()),
  classes(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), static_cast<std::uint8_t>(fill))
{
}

void SemanticRaster::validate() const
{
  spec.validate();
  require(width == spec.width() && height == spec.height(), "raster dimensions do not match its bev range");
  require(classes.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
    "raster buffer size does not match its dimensions");
  for (std::uint8_t v : classes) {
    require(v < kNumRasterClasses, "raster contains unknown class id " + std::to_string(v));
  }
}

BinaryGrid class_mask(const SemanticRaster & raster, RasterClass cls)
{
  BinaryGrid out(raster.width, raster.height);
  const auto id = static_cast<std::uint8_t>(cls);
  for (std::size_t i = 0; i < raster.classes.size(); ++i) {
    out.bits[i] = raster.classes[i] == id ? 1 : 0;
  }
  return out;
}

BevMask::BevMask(const BevSpec & s, bool observed) : spec(s), grid(s.width(), s.height(), observed ? 1 : 0) {}

bool BevMask::observed_at(Point2 p) const
{
  if (!spec.contains(p)) {
    return false;
  }
  // Points on the far edges belong to the last row/column.
  const int r = std::clamp(spec.row_of(p.y), 0, grid.height - 1);
  const int c = std::clamp(spec.col_of(p.x), 0, grid.width - 1);
  return grid.at(r, c) != 0;
}

void BevMask::validate() const
{
  spec.validate();
  require(grid.width == spec.width() && grid.height == spec.height(), "mask dimensions do not match its bev range");
  require(grid.bits.size() == static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height),
    "mask buffer size does not match its dimensions");
}

BevMask observed_mask(const SemanticRaster & raster)
{
  BevMask mask(raster.spec, false);
  for (std::size_t i = 0; i < raster.classes.size(); ++i) {
    mask.grid.bits[i] = raster.classes[i] != static_cast<std::uint8_t>(RasterClass::kUnobserved) ? 1 : 0;
  }
  return mask;
}

void StructuringElement::validate() const
{
  require(size >= 1 && size % 2 == 1, "structuring element size must be odd and >= 1");
}

std::vector<std::pair<int, int>> StructuringElement::offsets() const
{
  validate();
  const int r = size / 2;
  std::vector<std::pair<int, int>> out;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (shape == Shape::kDisk && dx * dx + dy * dy > r * r) {
        continue;
      }
      out.emplace_back(dy, dx);
    }
  }
  return out;
}

std::string_view to_string(StructuringElement::Shape shape)
{
  return shape == StructuringElement::Shape::kDisk ? "disk" : "square";
}

StructuringElement::Shape shape_from_string(std::string_view name)
{
  if (name == "square") {
    return StructuringElement::Shape::kSquare;
  }
  if (name == "disk") {
    return StructuringElement::Shape::kDisk;
  }
  fail(ErrorCode::kValidation, "unknown structuring element shape '" + std::string(name) + "'");
}

}  // namespace pseudomap
