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

#ifndef PSEUDOMAP__RASTER_HPP_
#define PSEUDOMAP__RASTER_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pseudomap/geometry.hpp"

namespace pseudomap
{

/// Semantic BEV class IDs; the numeric values are the on-disk pixel values.
enum class RasterClass : std::uint8_t
{
  kUnobserved = 0,
  kRoad = 1,
  kOutside = 2,
  kLaneMarking = 3,
  kPedCrossing = 4,
};

inline constexpr int kNumRasterClasses = 5;
std::string_view to_string(RasterClass cls);

/// Row-major 0/1 grid.
struct BinaryGrid
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryGrid() = default;
  BinaryGrid(int w, int h, std::uint8_t fill = 0)
  : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
  {
  }

  bool in_bounds(int r, int c) const { return r >= 0 && c >= 0 && r < height && c < width; }
  std::uint8_t & at(int r, int c) { return bits[static_cast<std::size_t>(r) * width + c]; }
  std::uint8_t at(int r, int c) const { return bits[static_cast<std::size_t>(r) * width + c]; }
  /// Out-of-bounds reads are background.
  std::uint8_t get(int r, int c) const { return in_bounds(r, c) ? at(r, c) : 0; }
  std::size_t count() const;

  friend bool operator==(const BinaryGrid &, const BinaryGrid &) = default;
};

struct SemanticRaster
{
  BevSpec spec;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> classes;

  SemanticRaster() = default;
  SemanticRaster(const BevSpec & s, RasterClass fill);

  RasterClass at(int r, int c) const
  {
    return static_cast<RasterClass>(classes[static_cast<std::size_t>(r) * width + c]);
  }
  void set(int r, int c, RasterClass cls) { classes[static_cast<std::size_t>(r) * width + c] = static_cast<std::uint8_t>(cls); }
  bool in_bounds(int r, int c) const { return r >= 0 && c >= 0 && r < height && c < width; }

  /// Throws Error(kValidation) on dimension mismatch or unknown class IDs.
  void validate() const;

  friend bool operator==(const SemanticRaster &, const SemanticRaster &) = default;
};

BinaryGrid class_mask(const SemanticRaster & raster, RasterClass cls);

/// Binary observed/unobserved mask over a BEV window.
struct BevMask
{
  BevSpec spec;
  BinaryGrid grid;

  BevMask() = default;
  BevMask(const BevSpec & s, bool observed);

  int width() const { return grid.width; }
  int height() const { return grid.height; }
  /// False outside the window; points on its edge count as inside.
  bool observed_at(Point2 p) const;
  void validate() const;

  friend bool operator==(const BevMask &, const BevMask &) = default;
};

/// Observed = class != Unobserved.
BevMask observed_mask(const SemanticRaster & raster);

struct StructuringElement
{
  enum class Shape
  {
    kSquare,
    kDisk,
  };

  Shape shape = Shape::kSquare;
  int size = 15;  // odd, pixels

  void validate() const;
  /// (dy, dx) offsets, row-major order.
  std::vector<std::pair<int, int>> offsets() const;

  friend bool operator==(const StructuringElement &, const StructuringElement &) = default;
};

std::string_view to_string(StructuringElement::Shape shape);
StructuringElement::Shape shape_from_string(std::string_view name);

}  // namespace pseudomap

#endif  // PSEUDOMAP__RASTER_HPP_
