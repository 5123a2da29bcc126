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

#include "pseudomap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "pseudomap/error.hpp"
#include "pseudomap/simd/kernels.hpp"

namespace pseudomap
{

std::string_view to_string(MapClass cls)
{
  switch (cls) {
    case MapClass::kPedCrossing:
      return "ped_crossing";
    case MapClass::kDivider:
      return "divider";
    case MapClass::kBoundary:
      return "boundary";
  }
  return "unknown";
}

std::string_view to_string(ElementKind kind)
{
  return kind == ElementKind::kPolygon ? "polygon" : "polyline";
}

MapClass map_class_from_string(std::string_view name)
{
  for (MapClass cls : kAllMapClasses) {
    if (to_string(cls) == name) {
      return cls;
    }
  }
  fail(ErrorCode::kValidation, "unknown map class '" + std::string(name) + "'");
}

ElementKind element_kind_from_string(std::string_view name)
{
  if (name == "polyline") {
    return ElementKind::kPolyline;
  }
  if (name == "polygon") {
    return ElementKind::kPolygon;
  }
  fail(ErrorCode::kValidation, "unknown element kind '" + std::string(name) + "'");
}

ElementKind natural_kind(MapClass cls)
{
  return cls == MapClass::kPedCrossing ? ElementKind::kPolygon : ElementKind::kPolyline;
}

void validate_element(const MapElement & element)
{
  require(element.points.size() >= 2, "map element needs at least 2 points");
  for (const Point2 & p : element.points) {
    require(std::isfinite(p.x) && std::isfinite(p.y), "map element has a non-finite point");
  }
  require(element.kind == natural_kind(element.cls),
    std::string(to_string(element.cls)) + " must be a " + std::string(to_string(natural_kind(element.cls))));
  if (element.kind == ElementKind::kPolygon) {
    require(element.points.size() >= 3, "polygon needs at least 3 points");
    require(!(element.points.front() == element.points.back()),
      "polygon must be stored open (first point != last point)");
  }
  if (element.confidence) {
    require(*element.confidence >= 0.0 && *element.confidence <= 1.0, "confidence must lie in [0, 1]");
  }
}

int BevSpec::width() const
{
  return static_cast<int>(std::lround((x_max - x_min) * resolution));
}

int BevSpec::height() const
{
  return static_cast<int>(std::lround((y_max - y_min) * resolution));
}

void BevSpec::validate() const
{
  require(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) && std::isfinite(y_max),
    "bev range must be finite");
  require(x_max > x_min && y_max > y_min, "bev range must have x_max > x_min and y_max > y_min");
  require(resolution > 0.0 && std::isfinite(resolution), "bev resolution must be positive");
  const double w = (x_max - x_min) * resolution;
  const double h = (y_max - y_min) * resolution;
  require(std::abs(w - std::round(w)) < 1e-6 && std::abs(h - std::round(h)) < 1e-6,
    "bev range times resolution must give an integral grid size");
}

Pose2 Pose2::compose(const Pose2 & other) const
{
  const Point2 p = to_world({other.x, other.y});
  return {p.x, p.y, wrap_angle(heading + other.heading)};
}

double wrap_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) {
    r += two_pi;
  }
  return r - std::numbers::pi;
}

double arc_length(std::span<const Point2> points, bool closed)
{
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += distance(points[i - 1], points[i]);
  }
  if (closed && points.size() > 1) {
    total += distance(points.back(), points.front());
  }
  return total;
}

std::vector<Point2> resample(std::span<const Point2> points, std::size_t count, bool closed)
{
  require(points.size() >= 2, "resample needs at least 2 input points");
  require(count >= 2, "resample needs at least 2 output points");

  std::vector<Point2> ring(points.begin(), points.end());
  if (closed) {
    ring.push_back(points.front());
  }
  std::vector<double> cum(ring.size(), 0.0);
  for (std::size_t i = 1; i < ring.size(); ++i) {
    cum[i] = cum[i - 1] + distance(ring[i - 1], ring[i]);
  }
  const double total = cum.back();
  if (!(total > 0.0)) {
    fail(ErrorCode::kDegenerateGeometry, "degenerate geometry");
  }

  const double step = closed ? total / static_cast<double>(count) : total / static_cast<double>(count - 1);
  std::vector<Point2> out;
  out.reserve(count);
  std::size_t seg = 0;
  const std::size_t n_seg = ring.size() - 1;
  for (std::size_t k = 0; k < count; ++k) {
    if (!closed && k + 1 == count) {
      out.push_back(ring.back());
      break;
    }
    const double s = step * static_cast<double>(k);
    while (seg + 1 < n_seg && cum[seg + 1] < s) {
      ++seg;
    }
    const double len = cum[seg + 1] - cum[seg];
    if (len <= 0.0) {
      out.push_back(ring[seg]);
      continue;
    }
    const double f = std::clamp((s - cum[seg]) / len, 0.0, 1.0);
    const Point2 a = ring[seg];
    const Point2 b = ring[seg + 1];
    out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
  }
  return out;
}

MapElement resample(const MapElement & element, std::size_t count)
{
  MapElement out = element;
  out.points = resample(element.points, count, element.closed());
  return out;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b)
{
  const Point2 e = b - a;
  const double len2 = dot(e, e);
  double t = len2 > 0.0 ? dot(p - a, e) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * e);
}

double point_polyline_distance(Point2 p, std::span<const Point2> points, bool closed)
{
  if (points.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  if (points.size() == 1) {
    return distance(p, points.front());
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < points.size(); ++i) {
    best = std::min(best, point_segment_distance(p, points[i - 1], points[i]));
  }
  if (closed) {
    best = std::min(best, point_segment_distance(p, points.back(), points.front()));
  }
  return best;
}

namespace
{

bool lex_less(Point2 a, Point2 b)
{
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

double signed_area(std::span<const Point2> ring)
{
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    twice += cross(ring[i], ring[(i + 1) % ring.size()]);
  }
  return 0.5 * twice;
}

double directed_mean(const std::vector<Point2> & from, const std::vector<double> & to_x,
  const std::vector<double> & to_y)
{
  const auto & k = simd::kernels();
  double sum = 0.0;
  for (const Point2 & p : from) {
    sum += std::sqrt(k.nearest_dist_sq(p.x, p.y, to_x.data(), to_y.data(), to_x.size()));
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

std::vector<Point2> canonical_ordering(const MapElement & element)
{
  std::vector<Point2> pts = element.points;
  if (pts.empty()) {
    return pts;
  }
  if (element.closed()) {
    if (signed_area(pts) < 0.0) {
      std::reverse(pts.begin(), pts.end());
    }
    const auto first = std::min_element(pts.begin(), pts.end(), lex_less);
    std::rotate(pts.begin(), first, pts.end());
  } else if (lex_less(pts.back(), pts.front())) {
    std::reverse(pts.begin(), pts.end());
  }
  return pts;
}

double chamfer_distance(const MapElement & a, const MapElement & b, std::size_t n_samples)
{
  require(n_samples >= 2, "chamfer distance needs n_samples >= 2");
  const std::vector<Point2> sa = resample(canonical_ordering(a), n_samples, a.closed());
  const std::vector<Point2> sb = resample(canonical_ordering(b), n_samples, b.closed());
  std::vector<double> ax(sa.size()), ay(sa.size()), bx(sb.size()), by(sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    ax[i] = sa[i].x;
    ay[i] = sa[i].y;
  }
  for (std::size_t i = 0; i < sb.size(); ++i) {
    bx[i] = sb[i].x;
    by[i] = sb[i].y;
  }
  const double ab = directed_mean(sa, bx, by);
  const double ba = directed_mean(sb, ax, ay);
  return 0.5 * (ab + ba);
}

namespace
{

Point2 clamp_to(Point2 p, const BevSpec & spec)
{
  return {std::clamp(p.x, spec.x_min, spec.x_max), std::clamp(p.y, spec.y_min, spec.y_max)};
}

void push_distinct(std::vector<Point2> & out, Point2 p)
{
  if (out.empty() || !(out.back() == p)) {
    out.push_back(p);
  }
}

// Liang-Barsky parametric clip of a + t (b - a), t in [0, 1].
bool clip_segment(Point2 a, Point2 b, const BevSpec & spec, double & t0, double & t1)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - spec.x_min, spec.x_max - a.x, a.y - spec.y_min, spec.y_max - a.y};
  t0 = 0.0;
  t1 = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) {
        return false;
      }
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  return t0 <= t1;
}

}  // namespace

std::vector<std::vector<Point2>> clip_polyline(std::span<const Point2> points, const BevSpec & spec)
{
  std::vector<std::vector<Point2>> fragments;
  std::vector<Point2> current;
  auto flush = [&]() {
    if (current.size() >= 2) {
      fragments.push_back(std::move(current));
    }
    current.clear();
  };
  if (points.size() == 1 && spec.contains(points.front())) {
    return fragments;
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point2 a = points[i - 1];
    const Point2 b = points[i];
    double t0 = 0.0;
    double t1 = 1.0;
    if (!clip_segment(a, b, spec, t0, t1)) {
      flush();
      continue;
    }
    const Point2 e = b - a;
    const Point2 p0 = t0 <= 0.0 ? a : clamp_to(a + t0 * e, spec);
    const Point2 p1 = t1 >= 1.0 ? b : clamp_to(a + t1 * e, spec);
    if (t0 > 0.0) {
      flush();
    }
    push_distinct(current, p0);
    push_distinct(current, p1);
    if (t1 < 1.0) {
      flush();
    }
  }
  flush();
  return fragments;
}

std::vector<Point2> clip_polygon(std::span<const Point2> points, const BevSpec & spec)
{
  // Sutherland-Hodgman against the four half-planes.
  std::vector<Point2> ring(points.begin(), points.end());
  struct Plane
  {
    int axis;
    double value;
    bool keep_greater;
  };
  const Plane planes[4] = {
    {0, spec.x_min, true}, {0, spec.x_max, false}, {1, spec.y_min, true}, {1, spec.y_max, false}};
  for (const Plane & plane : planes) {
    if (ring.empty()) {
      break;
    }
    auto coord = [&](Point2 p) { return plane.axis == 0 ? p.x : p.y; };
    auto inside = [&](Point2 p) { return plane.keep_greater ? coord(p) >= plane.value : coord(p) <= plane.value; };
    auto intersect = [&](Point2 a, Point2 b) {
      const double t = (plane.value - coord(a)) / (coord(b) - coord(a));
      Point2 r = a + t * (b - a);
      if (plane.axis == 0) {
        r.x = plane.value;
      } else {
        r.y = plane.value;
      }
      return r;
    };
    std::vector<Point2> out;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point2 cur = ring[i];
      const Point2 prev = ring[(i + ring.size() - 1) % ring.size()];
      const bool in_cur = inside(cur);
      const bool in_prev = inside(prev);
      if (in_cur) {
        if (!in_prev) {
          push_distinct(out, intersect(prev, cur));
        }
        push_distinct(out, cur);
      } else if (in_prev) {
        push_distinct(out, intersect(prev, cur));
      }
    }
    ring = std::move(out);
  }
  while (ring.size() > 1 && ring.front() == ring.back()) {
    ring.pop_back();
  }
  if (ring.size() < 3 || std::abs(signed_area(ring)) <= 0.0) {
    return {};
  }
  return ring;
}

VectorMap crop_to_range(const VectorMap & map, const BevSpec & spec)
{
  VectorMap out;
  out.frame = map.frame;
  out.bev_range = spec;
  for (const MapElement & element : map.elements) {
    if (element.closed()) {
      std::vector<Point2> ring = clip_polygon(element.points, spec);
      if (ring.size() >= 3) {
        MapElement clipped = element;
        clipped.points = std::move(ring);
        out.elements.push_back(std::move(clipped));
      }
      continue;
    }
    for (std::vector<Point2> & fragment : clip_polyline(element.points, spec)) {
      MapElement clipped = element;
      clipped.points = std::move(fragment);
      out.elements.push_back(std::move(clipped));
    }
  }
  return out;
}

std::vector<std::vector<Point2>> equivalent_orderings(const MapElement & element)
{
  std::vector<std::vector<Point2>> out;
  const std::vector<Point2> & fwd = element.points;
  std::vector<Point2> rev(fwd.rbegin(), fwd.rend());
  if (!element.closed()) {
    out.push_back(fwd);
    out.push_back(std::move(rev));
    return out;
  }
  const std::size_t n = fwd.size();
  out.reserve(2 * n);
  for (const std::vector<Point2> * base : {&fwd, static_cast<const std::vector<Point2> *>(&rev)}) {
    for (std::size_t shift = 0; shift < n; ++shift) {
      std::vector<Point2> rotated(n);
      for (std::size_t i = 0; i < n; ++i) {
        rotated[i] = (*base)[(i + shift) % n];
      }
      out.push_back(std::move(rotated));
    }
  }
  return out;
}

Aabb bounding_box(std::span<const Point2> points)
{
  Aabb box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
           {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Point2 & p : points) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
  }
  return box;
}

double box_distance(const Aabb & a, const Aabb & b)
{
  const double gx = std::max({0.0, a.lo.x - b.hi.x, b.lo.x - a.hi.x});
  const double gy = std::max({0.0, a.lo.y - b.hi.y, b.lo.y - a.hi.y});
  return std::hypot(gx, gy);
}

}  // namespace pseudomap
