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

#ifndef PSEUDOMAP__GEOMETRY_HPP_
#define PSEUDOMAP__GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pseudomap
{

/// Ego-frame point in meters. x is lateral (right positive), y is
/// longitudinal (forward positive).
struct Point2
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

enum class MapClass
{
  kPedCrossing = 0,
  kDivider = 1,
  kBoundary = 2,
};

inline constexpr int kNumMapClasses = 3;
inline constexpr std::array<MapClass, kNumMapClasses> kAllMapClasses = {
  MapClass::kPedCrossing, MapClass::kDivider, MapClass::kBoundary};

enum class ElementKind
{
  kPolyline,
  kPolygon,
};

std::string_view to_string(MapClass cls);
std::string_view to_string(ElementKind kind);
MapClass map_class_from_string(std::string_view name);
ElementKind element_kind_from_string(std::string_view name);

/// Crossings are polygons, dividers and boundaries are polylines.
ElementKind natural_kind(MapClass cls);

/// Polygons are stored as open rings: the closing edge from the last point
/// back to the first is implicit.
struct MapElement
{
  MapClass cls = MapClass::kDivider;
  ElementKind kind = ElementKind::kPolyline;
  std::vector<Point2> points;
  std::optional<double> confidence;

  bool closed() const { return kind == ElementKind::kPolygon; }
  friend bool operator==(const MapElement &, const MapElement &) = default;
};

/// Throws Error(kValidation) when the element breaks a MapElement invariant.
void validate_element(const MapElement & element);

/// Metric BEV window and its pixel grid. Row 0 is the maximum y.
struct BevSpec
{
  double x_min = -15.0;
  double x_max = 15.0;
  double y_min = -30.0;
  double y_max = 30.0;
  double resolution = 20.0;  // pixels per meter

  int width() const;
  int height() const;
  void validate() const;

  Point2 pixel_center(int row, int col) const
  {
    return {x_min + (col + 0.5) / resolution, y_max - (row + 0.5) / resolution};
  }
  /// Column/row of the pixel containing p; may be outside [0, width/height).
  int col_of(double x) const { return static_cast<int>(std::floor((x - x_min) * resolution)); }
  int row_of(double y) const { return static_cast<int>(std::floor((y_max - y) * resolution)); }
  bool contains(Point2 p, double tol = 0.0) const
  {
    return p.x >= x_min - tol && p.x <= x_max + tol && p.y >= y_min - tol && p.y <= y_max + tol;
  }
  /// Same window grown by `margin` meters on every side.
  BevSpec expanded(double margin) const
  {
    return {x_min - margin, x_max + margin, y_min - margin, y_max + margin, resolution};
  }

  friend bool operator==(const BevSpec &, const BevSpec &) = default;
};

struct VectorMap
{
  std::string frame;
  BevSpec bev_range;
  std::vector<MapElement> elements;

  friend bool operator==(const VectorMap &, const VectorMap &) = default;
};

/// Planar pose. The ego-to-world map is p_world = t + R(heading) p_ego.
struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Point2 to_world(Point2 p) const
  {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    return {x + c * p.x - s * p.y, y + s * p.x + c * p.y};
  }
  Point2 to_local(Point2 p) const
  {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    const double dx = p.x - x;
    const double dy = p.y - y;
    return {c * dx + s * dy, -s * dx + c * dy};
  }
  /// this ∘ other
  Pose2 compose(const Pose2 & other) const;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

double arc_length(std::span<const Point2> points, bool closed = false);

/// Arc-length uniform resampling to exactly `count` points. Open polylines
/// keep both endpoints; closed rings keep the first point and space `count`
/// samples over the perimeter including the closing edge.
std::vector<Point2> resample(std::span<const Point2> points, std::size_t count, bool closed = false);
MapElement resample(const MapElement & element, std::size_t count);

/// Distance from p to segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);
/// Distance from p to the polyline (or ring boundary when closed).
double point_polyline_distance(Point2 p, std::span<const Point2> points, bool closed);

inline constexpr std::size_t kDefaultChamferSamples = 100;

/// Symmetric mean of the two directed mean nearest-sample distances.
double chamfer_distance(
  const MapElement & a, const MapElement & b, std::size_t n_samples = kDefaultChamferSamples);

/// Clips every element to the rectangle. Polylines split where they leave
/// it; polygons are intersected with it.
VectorMap crop_to_range(const VectorMap & map, const BevSpec & spec);
std::vector<std::vector<Point2>> clip_polyline(std::span<const Point2> points, const BevSpec & spec);
std::vector<Point2> clip_polygon(std::span<const Point2> points, const BevSpec & spec);

/// All point orderings describing the same geometry: forward and reversed
/// for polylines; every cyclic shift in both orientations for polygons.
std::vector<std::vector<Point2>> equivalent_orderings(const MapElement & element);

/// A fixed representative of equivalent_orderings, so that any two
/// orderings of one element map to the same point sequence.
std::vector<Point2> canonical_ordering(const MapElement & element);

struct Aabb
{
  Point2 lo;
  Point2 hi;
};
Aabb bounding_box(std::span<const Point2> points);
/// Gap between two boxes; 0 when they overlap.
double box_distance(const Aabb & a, const Aabb & b);

}  // namespace pseudomap

#endif  // PSEUDOMAP__GEOMETRY_HPP_
