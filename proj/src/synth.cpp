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

#include "pseudomap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pseudomap/error.hpp"
#include "pseudomap/simd/kernels.hpp"

namespace pseudomap
{

void DashPattern::validate() const
{
  require(on > 0.0 && off >= 0.0, "dash pattern needs on > 0 and off >= 0");
}

void SceneParams::validate() const
{
  require(n_lanes >= 1, "n_lanes must be at least 1");
  require(lane_width > 0.0, "lane_width must be positive");
  require(std::abs(curvature) <= 0.03, "curvature must lie in [-0.03, 0.03]");
  require(n_crossings >= 0, "n_crossings must be non-negative");
  dash.validate();
  spec.validate();
}

namespace
{

constexpr double kSampleStep = 0.5;        // meters along the corridor
constexpr double kCrossingInset = 0.5;     // gap between crossing and boundary
constexpr double kCrossingClearance = 1.0; // divider gap around a crossing

// Constant-curvature corridor through (x0, 0) heading +y.
struct Corridor
{
  double x0 = 0.0;
  double curvature = 0.0;

  Point2 at(double s, double offset) const
  {
    if (curvature == 0.0) {
      return {x0 + offset, s};
    }
    const double r = 1.0 / curvature;
    const double th = s / r;
    const Point2 center{x0 + r, 0.0};
    const Point2 on_axis{center.x - r * std::cos(th), center.y + r * std::sin(th)};
    return {on_axis.x + offset * std::cos(th), on_axis.y - offset * std::sin(th)};
  }

  std::vector<Point2> sample(double s0, double s1, double offset) const
  {
    std::vector<Point2> pts{at(s0, offset)};
    const double first = std::floor(s0 / kSampleStep) + 1.0;
    for (double k = first; k * kSampleStep < s1 - 1e-9; k += 1.0) {
      if (k * kSampleStep - s0 > 1e-9) {
        pts.push_back(at(k * kSampleStep, offset));
      }
    }
    pts.push_back(at(s1, offset));
    return pts;
  }
};

}  // namespace

VectorMap gen_scene(const SceneParams & params)
{
  params.validate();
  SplitMix64 rng(params.seed);
  const BevSpec & spec = params.spec;
  const double half_road = 0.5 * params.n_lanes * params.lane_width;

  Corridor corridor;
  corridor.curvature = params.curvature;
  corridor.x0 = rng.uniform(-1.5, 1.5);
  const BevSpec outer = spec.expanded(5.0);
  const double reach = std::hypot(std::max(std::abs(outer.x_min), std::abs(outer.x_max)),
    std::max(std::abs(outer.y_min), std::abs(outer.y_max)));

  // Crossing intervals along the corridor, kept apart from each other.
  const double half_y = 0.5 * (spec.y_max - spec.y_min);
  const double y_mid = 0.5 * (spec.y_max + spec.y_min);
  std::vector<std::pair<double, double>> crossings;
  for (int c = 0; c < params.n_crossings; ++c) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double width = rng.uniform(3.0, 4.5);
      const double center = y_mid + rng.uniform(-0.7, 0.7) * half_y;
      bool clear = true;
      for (const auto & [lo, hi] : crossings) {
        if (center + 0.5 * width + 6.0 > lo && center - 0.5 * width - 6.0 < hi) {
          clear = false;
        }
      }
      if (clear) {
        crossings.push_back({center - 0.5 * width, center + 0.5 * width});
        break;
      }
    }
  }
  std::sort(crossings.begin(), crossings.end());

  VectorMap map;
  map.frame = "scene_" + std::to_string(params.seed);
  map.bev_range = spec;

  for (const auto & [lo, hi] : crossings) {
    const double left = -half_road + kCrossingInset;
    const double right = half_road - kCrossingInset;
    if (right - left <= 0.0) {
      continue;
    }
    MapElement e;
    e.cls = MapClass::kPedCrossing;
    e.kind = ElementKind::kPolygon;
    e.points = {corridor.at(lo, left), corridor.at(lo, right), corridor.at(hi, right), corridor.at(hi, left)};
    map.elements.push_back(std::move(e));
  }

  std::vector<std::pair<double, double>> free_runs;
  double start = -reach;
  for (const auto & [lo, hi] : crossings) {
    free_runs.push_back({start, lo - kCrossingClearance});
    start = hi + kCrossingClearance;
  }
  free_runs.push_back({start, reach});
  for (int k = 1; k < params.n_lanes; ++k) {
    const double offset = -half_road + k * params.lane_width;
    for (const auto & [lo, hi] : free_runs) {
      if (hi - lo < 2.0 * kSampleStep) {
        continue;
      }
      MapElement e;
      e.cls = MapClass::kDivider;
      e.kind = ElementKind::kPolyline;
      e.points = corridor.sample(lo, hi, offset);
      map.elements.push_back(std::move(e));
    }
  }

  MapElement left;
  left.cls = MapClass::kBoundary;
  left.kind = ElementKind::kPolyline;
  left.points = corridor.sample(-reach, reach, -half_road);
  std::reverse(left.points.begin(), left.points.end());
  MapElement right = left;
  right.points = corridor.sample(-reach, reach, half_road);
  map.elements.push_back(std::move(left));
  map.elements.push_back(std::move(right));

  return crop_to_range(map, spec);
}

namespace
{

bool point_in_ring(Point2 p, const std::vector<Point2> & ring)
{
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[i];
    const Point2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

struct PixelWindow
{
  int r0;
  int r1;
  int c0;
  int c1;
};

PixelWindow window_of(const BevSpec & spec, int width, int height, Point2 lo, Point2 hi)
{
  return {std::max(0, spec.row_of(hi.y)), std::min(height - 1, spec.row_of(lo.y)),
          std::max(0, spec.col_of(lo.x)), std::min(width - 1, spec.col_of(hi.x))};
}

}  // namespace

SemanticRaster rasterize_gt(const VectorMap & map, const BevSpec & spec, const DashPattern & dash)
{
  spec.validate();
  dash.validate();
  SemanticRaster raster(spec, RasterClass::kOutside);
  const int w = raster.width;
  const int h = raster.height;

  std::vector<simd::Segment> segs;
  for (const MapElement & e : map.elements) {
    if (e.cls != MapClass::kBoundary) {
      continue;
    }
    for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
      segs.push_back(simd::make_segment(e.points[i].x, e.points[i].y, e.points[i + 1].x, e.points[i + 1].y));
    }
  }
  if (!segs.empty()) {
    const auto & k = simd::kernels();
    std::vector<double> xs(w);
    for (int c = 0; c < w; ++c) {
      xs[c] = spec.pixel_center(0, c).x;
    }
    std::vector<double> best_d2(w);
    std::vector<std::int32_t> best_seg(w);
    std::vector<double> best_t(w);
    for (int r = 0; r < h; ++r) {
      const double y = spec.pixel_center(r, 0).y;
      std::fill(best_d2.begin(), best_d2.end(), std::numeric_limits<double>::infinity());
      for (std::size_t s = 0; s < segs.size(); ++s) {
        k.segment_update(xs.data(), y, w, segs[s], static_cast<std::int32_t>(s), best_d2.data(), best_seg.data(), best_t.data());
      }
      for (int c = 0; c < w; ++c) {
        const simd::Segment & sg = segs[best_seg[c]];
        const double side = sg.ex * (y - sg.ay) - sg.ey * (xs[c] - sg.ax);
        if (side > 0.0) {
          raster.set(r, c, RasterClass::kRoad);
        }
      }
    }
  }

  const double half = 0.5 * kMarkingWidth;
  for (const MapElement & e : map.elements) {
    if (e.cls != MapClass::kDivider) {
      continue;
    }
    // The pattern is stretched to a whole number of periods plus one dash,
    // so that every divider starts and ends on a full dash.
    const double total = arc_length(e.points);
    const double n_periods = std::max(0.0, std::round((total - dash.on) / (dash.on + dash.off)));
    const double stretch = total > dash.on ? total / (n_periods * (dash.on + dash.off) + dash.on) : 1.0;
    const double on = total > dash.on ? dash.on * stretch : total + 1.0;
    const double period = (dash.on + dash.off) * stretch;
    double along = 0.0;
    for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
      const Point2 a = e.points[i];
      const Point2 b = e.points[i + 1];
      const double len = distance(a, b);
      const Point2 lo{std::min(a.x, b.x) - half, std::min(a.y, b.y) - half};
      const Point2 hi{std::max(a.x, b.x) + half, std::max(a.y, b.y) + half};
      const PixelWindow win = window_of(spec, w, h, lo, hi);
      for (int r = win.r0; r <= win.r1; ++r) {
        for (int c = win.c0; c <= win.c1; ++c) {
          const Point2 p = spec.pixel_center(r, c);
          double t = len > 0.0 ? dot(p - a, b - a) / (len * len) : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          if (distance(p, a + t * (b - a)) > half) {
            continue;
          }
          if (std::fmod(along + t * len, period) <= on) {
            raster.set(r, c, RasterClass::kLaneMarking);
          }
        }
      }
      along += len;
    }
  }

  for (const MapElement & e : map.elements) {
    if (e.cls != MapClass::kPedCrossing || e.points.size() < 3) {
      continue;
    }
    const Aabb box = bounding_box(e.points);
    const PixelWindow win = window_of(spec, w, h, box.lo, box.hi);
    for (int r = win.r0; r <= win.r1; ++r) {
      for (int c = win.c0; c <= win.c1; ++c) {
        if (point_in_ring(spec.pixel_center(r, c), e.points)) {
          raster.set(r, c, RasterClass::kPedCrossing);
        }
      }
    }
  }
  return raster;
}

void OcclusionParams::validate() const
{
  require(n_blobs >= 0, "n_blobs must be non-negative");
  require(blob_radius_min > 0.0 && blob_radius_max >= blob_radius_min, "blob radii must be positive and ordered");
  require(frustum_fov >= 0.0, "frustum_fov must be non-negative");
  require(frustum_range >= 0.0, "frustum_range must be non-negative");
}

void occlude_disk(BevMask & mask, Point2 center, double radius)
{
  const BevSpec & spec = mask.spec;
  const PixelWindow win = window_of(spec, mask.width(), mask.height(),
    {center.x - radius, center.y - radius}, {center.x + radius, center.y + radius});
  for (int r = win.r0; r <= win.r1; ++r) {
    for (int c = win.c0; c <= win.c1; ++c) {
      if (distance(spec.pixel_center(r, c), center) <= radius) {
        mask.grid.at(r, c) = 0;
      }
    }
  }
}

BevMask gen_occlusion(const OcclusionParams & params, const Pose2 & pose, const BevSpec & spec)
{
  params.validate();
  spec.validate();
  BevMask mask(spec, false);
  const Point2 origin{pose.x, pose.y};
  const Point2 axis{-std::sin(pose.heading), std::cos(pose.heading)};
  const bool full_circle = params.frustum_fov >= 2.0 * std::numbers::pi;
  const double cos_half = std::cos(0.5 * params.frustum_fov);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      const Point2 v = spec.pixel_center(r, c) - origin;
      const double d = norm(v);
      if (!(d < params.frustum_range)) {
        continue;
      }
      if (!full_circle && d > 0.0 && dot(v, axis) < cos_half * d) {
        continue;
      }
      mask.grid.at(r, c) = 1;
    }
  }
  SplitMix64 rng(params.seed);
  for (int b = 0; b < params.n_blobs; ++b) {
    const Point2 center{rng.uniform(spec.x_min, spec.x_max), rng.uniform(spec.y_min, spec.y_max)};
    const double radius = rng.uniform(params.blob_radius_min, params.blob_radius_max);
    occlude_disk(mask, center, radius);
  }
  return mask;
}

BevMask multi_trip_union(const std::vector<BevMask> & masks)
{
  require(!masks.empty(), "multi_trip_union needs at least one mask");
  BevMask out = masks.front();
  const auto & k = simd::kernels();
  for (std::size_t i = 1; i < masks.size(); ++i) {
    require(masks[i].spec == out.spec, "masks must share one BEV spec");
    k.or_into(out.grid.bits.data(), masks[i].grid.bits.data(), out.grid.bits.size());
  }
  return out;
}

}  // namespace pseudomap
