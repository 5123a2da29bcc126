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

#include "pseudomap/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "pseudomap/error.hpp"

namespace pseudomap
{
namespace
{

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

class SkeletonTracer
{
public:
  SkeletonTracer(const BinaryGrid & skeleton, int min_branch)
  : grid_(skeleton), min_branch_(min_branch),
    member_(skeleton.bits.size(), 0), dist_(skeleton.bits.size(), -1), parent_(skeleton.bits.size(), -1)
  {
  }

  std::vector<PixelPath> run()
  {
    std::deque<std::vector<std::size_t>> work;
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < grid_.bits.size(); ++i) {
      if (grid_.bits[i]) {
        all.push_back(i);
      }
    }
    split_into(all, work);
    std::vector<PixelPath> out;
    while (!work.empty()) {
      std::vector<std::size_t> comp = std::move(work.front());
      work.pop_front();
      std::vector<std::size_t> path = longest_path(comp);
      PixelPath pp;
      for (std::size_t idx : path) {
        pp.pixels.push_back({static_cast<int>(idx / grid_.width), static_cast<int>(idx % grid_.width)});
      }
      out.push_back(std::move(pp));
      for (std::size_t idx : path) {
        member_[idx] = 0;
      }
      std::vector<std::size_t> rest;
      for (std::size_t idx : comp) {
        if (member_[idx]) {
          rest.push_back(idx);
          member_[idx] = 0;
        }
      }
      split_into(rest, work);
    }
    return out;
  }

private:
  template <typename F>
  void for_neighbours(std::size_t idx, F && f) const
  {
    const int r = static_cast<int>(idx / grid_.width);
    const int c = static_cast<int>(idx % grid_.width);
    for (int k = 0; k < 8; ++k) {
      const int rr = r + kDr[k];
      const int cc = c + kDc[k];
      if (!grid_.in_bounds(rr, cc)) {
        continue;
      }
      const std::size_t n = static_cast<std::size_t>(rr) * grid_.width + cc;
      if (member_[n]) {
        f(n);
      }
    }
  }

  // Splits `pixels` (ascending) into 8-connected groups and queues those
  // large enough. member_ is left set for the queued pixels only.
  void split_into(const std::vector<std::size_t> & pixels, std::deque<std::vector<std::size_t>> & work)
  {
    for (std::size_t idx : pixels) {
      member_[idx] = 1;
    }
    std::vector<std::uint8_t> seen_local;
    for (std::size_t idx : pixels) {
      if (member_[idx] != 1) {
        continue;
      }
      std::vector<std::size_t> comp{idx};
      member_[idx] = 2;
      for (std::size_t head = 0; head < comp.size(); ++head) {
        for_neighbours(comp[head], [&](std::size_t n) {
          if (member_[n] == 1) {
            member_[n] = 2;
            comp.push_back(n);
          }
        });
      }
      std::sort(comp.begin(), comp.end());
      if (static_cast<int>(comp.size()) >= min_branch_) {
        work.push_back(std::move(comp));
      } else {
        for (std::size_t p : comp) {
          member_[p] = 3;  // dropped
        }
      }
    }
    for (std::size_t idx : pixels) {
      member_[idx] = member_[idx] == 2 ? 1 : 0;
    }
  }

  // BFS over the current members of `comp`; the edge (ban_a, ban_b) is
  // skipped when given. Returns the farthest pixel, ties to the smallest.
  std::size_t bfs(const std::vector<std::size_t> & comp, std::size_t src, std::size_t ban_a, std::size_t ban_b)
  {
    for (std::size_t idx : comp) {
      dist_[idx] = -1;
      parent_[idx] = -1;
    }
    std::vector<std::size_t> queue{src};
    dist_[src] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t cur = queue[head];
      for_neighbours(cur, [&](std::size_t n) {
        if (dist_[n] >= 0) {
          return;
        }
        if ((cur == ban_a && n == ban_b) || (cur == ban_b && n == ban_a)) {
          return;
        }
        dist_[n] = dist_[cur] + 1;
        parent_[n] = static_cast<std::int64_t>(cur);
        queue.push_back(n);
      });
    }
    std::size_t best = src;
    for (std::size_t idx : comp) {
      if (dist_[idx] > dist_[best]) {
        best = idx;
      }
    }
    return best;
  }

  std::vector<std::size_t> path_to(std::size_t dst) const
  {
    std::vector<std::size_t> path;
    for (std::int64_t cur = static_cast<std::int64_t>(dst); cur >= 0; cur = parent_[cur]) {
      path.push_back(static_cast<std::size_t>(cur));
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::vector<std::size_t> longest_path(const std::vector<std::size_t> & comp)
  {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t first_end = kNone;
    for (std::size_t idx : comp) {
      int degree = 0;
      for_neighbours(idx, [&](std::size_t) { ++degree; });
      if (degree <= 1) {
        first_end = idx;
        break;
      }
    }
    std::vector<std::size_t> path;
    if (first_end != kNone) {
      const std::size_t u = bfs(comp, first_end, kNone, kNone);
      const std::size_t v = bfs(comp, u, kNone, kNone);
      path = path_to(v);
    } else {
      // Ring without endpoints: cut the edge from the smallest pixel to
      // its smallest neighbour.
      const std::size_t s = comp.front();
      std::size_t n_min = kNone;
      for_neighbours(s, [&](std::size_t n) { n_min = std::min(n_min, n); });
      const std::size_t v = bfs(comp, s, s, n_min);
      path = path_to(v);
    }
    if (path.back() < path.front()) {
      std::reverse(path.begin(), path.end());
    }
    return path;
  }

  const BinaryGrid & grid_;
  int min_branch_;
  std::vector<std::uint8_t> member_;
  std::vector<int> dist_;
  std::vector<std::int64_t> parent_;
};

}  // namespace

std::vector<PixelPath> trace_lines(const BinaryGrid & skeleton, int min_branch)
{
  return SkeletonTracer(skeleton, std::max(1, min_branch)).run();
}

std::vector<Point2> rdp(std::span<const Point2> points, double epsilon)
{
  const std::size_t n = points.size();
  if (n <= 2) {
    return {points.begin(), points.end()};
  }
  std::vector<std::uint8_t> keep(n, 0);
  keep.front() = keep.back() = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t worst_i = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(points[i], points[lo], points[hi]);
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    if (worst > epsilon) {
      keep[worst_i] = 1;
      stack.push_back({worst_i, hi});
      stack.push_back({lo, worst_i});
    }
  }
  std::vector<Point2> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) {
      out.push_back(points[i]);
    }
  }
  return out;
}

namespace
{

std::vector<Point2> rdp_ring(std::span<const Point2> ring, double epsilon)
{
  const std::size_t n = ring.size();
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = distance(ring[i], ring[0]);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  std::vector<Point2> first(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(far) + 1);
  std::vector<Point2> second(ring.begin() + static_cast<std::ptrdiff_t>(far), ring.end());
  second.push_back(ring[0]);
  std::vector<Point2> out = rdp(first, epsilon);
  const std::vector<Point2> tail = rdp(second, epsilon);
  out.insert(out.end(), tail.begin() + 1, tail.end() - 1);
  return out;
}

}  // namespace

RdpResult rdp_iterative(std::span<const Point2> points, double eps1, std::size_t max_points, bool closed)
{
  require(eps1 > 0.0, "eps1 must be positive");
  require(max_points >= 2, "max_points must be at least 2");
  if (points.size() <= 2) {
    return {{points.begin(), points.end()}, eps1};
  }
  for (int t = 1;; ++t) {
    const double eps = eps1 * t;
    std::vector<Point2> simplified = closed ? rdp_ring(points, eps) : rdp(points, eps);
    if (simplified.size() <= max_points) {
      return {std::move(simplified), eps};
    }
  }
}

namespace
{

// Clockwise on screen (rows grow downward): E, SE, S, SW, W, NW, N, NE.
constexpr int kSr[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kSc[8] = {1, 1, 0, -1, -1, -1, 0, 1};

int direction_of(int dr, int dc)
{
  for (int k = 0; k < 8; ++k) {
    if (kSr[k] == dr && kSc[k] == dc) {
      return k;
    }
  }
  return 0;
}

}  // namespace

std::vector<PixelPath> trace_polygons(const BinaryGrid & grid)
{
  const int w = grid.width + 2;
  const int h = grid.height + 2;
  std::vector<int> f(static_cast<std::size_t>(w) * h, 0);
  auto F = [&](int r, int c) -> int & { return f[static_cast<std::size_t>(r) * w + c]; };
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      F(r + 1, c + 1) = grid.at(r, c) ? 1 : 0;
    }
  }
  std::vector<PixelPath> out;
  int nbd = 1;
  for (int i = 1; i < h - 1; ++i) {
    for (int j = 1; j < w - 1; ++j) {
      const int v = F(i, j);
      if (v == 0) {
        continue;
      }
      int i2 = 0;
      int j2 = 0;
      bool outer = false;
      if (v == 1 && F(i, j - 1) == 0) {
        outer = true;
        i2 = i;
        j2 = j - 1;
      } else if (v >= 1 && F(i, j + 1) == 0) {
        i2 = i;
        j2 = j + 1;
      } else {
        continue;
      }
      ++nbd;
      PixelPath path;
      path.closed = true;
      // Clockwise search around (i, j) starting at (i2, j2).
      const int d0 = direction_of(i2 - i, j2 - j);
      int i1 = -1;
      int j1 = -1;
      for (int k = 0; k < 8; ++k) {
        const int d = (d0 + k) % 8;
        if (F(i + kSr[d], j + kSc[d]) != 0) {
          i1 = i + kSr[d];
          j1 = j + kSc[d];
          break;
        }
      }
      if (i1 < 0) {
        F(i, j) = -nbd;
        if (outer) {
          path.pixels.push_back({i - 1, j - 1});
          out.push_back(std::move(path));
        }
        continue;
      }
      i2 = i1;
      j2 = j1;
      int i3 = i;
      int j3 = j;
      while (true) {
        if (outer) {
          path.pixels.push_back({i3 - 1, j3 - 1});
        }
        // Counter-clockwise search around (i3, j3) starting after (i2, j2).
        const int ds = direction_of(i2 - i3, j2 - j3);
        bool east_zero = false;
        int i4 = i3;
        int j4 = j3;
        for (int k = 1; k <= 8; ++k) {
          const int d = ((ds - k) % 8 + 8) % 8;
          const int rr = i3 + kSr[d];
          const int cc = j3 + kSc[d];
          if (F(rr, cc) != 0) {
            i4 = rr;
            j4 = cc;
            break;
          }
          if (d == 0) {
            east_zero = true;
          }
        }
        if (east_zero) {
          F(i3, j3) = -nbd;
        } else if (F(i3, j3) == 1) {
          F(i3, j3) = nbd;
        }
        if (i4 == i && j4 == j && i3 == i1 && j3 == j1) {
          break;
        }
        i2 = i3;
        j2 = j3;
        i3 = i4;
        j3 = j4;
      }
      if (outer) {
        out.push_back(std::move(path));
      }
    }
  }
  return out;
}

namespace
{

struct EdgeSet
{
  std::vector<Point2> a;
  std::vector<Point2> b;

  void add(const MapElement & e)
  {
    const std::size_t n = e.points.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      a.push_back(e.points[i]);
      b.push_back(e.points[i + 1]);
    }
    if (e.closed() && n >= 3) {
      a.push_back(e.points.back());
      b.push_back(e.points.front());
    }
  }
};

double undirected_angle(Point2 u, Point2 v)
{
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) {
    return std::numbers::pi / 2.0;
  }
  const double c = std::min(1.0, std::abs(dot(u, v)) / (nu * nv));
  return std::acos(c);
}

}  // namespace

std::vector<MapElement> filter_dividers(
  const std::vector<MapElement> & dividers, const std::vector<MapElement> & boundaries,
  const std::vector<MapElement> & crossings, const DividerGate & gate)
{
  EdgeSet edges;
  for (const auto & e : boundaries) {
    edges.add(e);
  }
  for (const auto & e : crossings) {
    edges.add(e);
  }
  std::vector<MapElement> out;
  for (const MapElement & div : dividers) {
    if (edges.a.empty() || div.points.size() < 2 || arc_length(div.points) == 0.0) {
      out.push_back(div);
      continue;
    }
    const std::vector<Point2> s = resample(div.points, kDividerFilterSamples);
    std::size_t gated = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Point2 tangent = s[std::min(k + 1, s.size() - 1)] - s[k == 0 ? 0 : k - 1];
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_e = 0;
      for (std::size_t e = 0; e < edges.a.size(); ++e) {
        const double d = point_segment_distance(s[k], edges.a[e], edges.b[e]);
        if (d < best) {
          best = d;
          best_e = e;
        }
      }
      if (best <= gate.distance && undirected_angle(tangent, edges.b[best_e] - edges.a[best_e]) <= gate.angle) {
        ++gated;
      }
    }
    if (2 * gated < s.size()) {
      out.push_back(div);
    }
  }
  return out;
}

void VectorizeParams::validate() const
{
  require(eps1 > 0.0, "eps1 must be positive");
  require(max_points >= 3, "max_points must be at least 3");
  lane_kernel.validate();
  boundary_kernel.validate();
  require(artifacts.min_area >= 0 && artifacts.thick_max >= 1, "invalid artifact parameters");
  require(min_branch >= 1, "min_branch must be at least 1");
  require(min_length >= 0.0, "min_length must be non-negative");
  require(gate.distance >= 0.0 && gate.angle >= 0.0, "divider gate must be non-negative");
  require(margin >= 0.0, "margin must be non-negative");
}

std::vector<Point2> pixels_to_points(const PixelPath & path, const BevSpec & spec)
{
  std::vector<Point2> pts;
  pts.reserve(path.pixels.size());
  for (const Pixel & p : path.pixels) {
    pts.push_back(spec.pixel_center(p.row, p.col));
  }
  return pts;
}

namespace
{

std::vector<MapElement> lines_from_skeleton(
  const BinaryGrid & skeleton, const BevSpec & spec, MapClass cls, const VectorizeParams & params)
{
  std::vector<MapElement> out;
  for (const PixelPath & path : trace_lines(skeleton, params.min_branch)) {
    if (path.pixels.size() < 2) {
      continue;
    }
    const std::vector<Point2> pts = pixels_to_points(path, spec);
    if (arc_length(pts) < params.min_length) {
      continue;
    }
    MapElement e;
    e.cls = cls;
    e.kind = ElementKind::kPolyline;
    e.points = rdp_iterative(pts, params.eps1, params.max_points).points;
    out.push_back(std::move(e));
  }
  return out;
}

double ring_area(const std::vector<Point2> & ring)
{
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    a += cross(ring[i], ring[(i + 1) % ring.size()]);
  }
  return 0.5 * a;
}

}  // namespace

VectorizeResult vectorize_bev(const SemanticRaster & raster, const VectorizeParams & params, const std::string & frame)
{
  params.validate();
  raster.validate();
  const int margin_px = static_cast<int>(std::lround(params.margin * raster.spec.resolution));
  const SemanticRaster extended = extend_margin(raster, margin_px);
  const SemanticRaster clean = remove_artifacts(extended, params.artifacts);
  const BevSpec & ext_spec = extended.spec;

  std::vector<MapElement> boundaries = lines_from_skeleton(
    skeletonize(extract_boundary(clean, params.boundary_kernel)), ext_spec, MapClass::kBoundary, params);

  const BinaryGrid lanes = connect_lane_fragments(
    class_mask(clean, RasterClass::kLaneMarking), clean, params.lane_kernel);
  std::vector<MapElement> dividers = lines_from_skeleton(skeletonize(lanes), ext_spec, MapClass::kDivider, params);

  std::vector<MapElement> crossings;
  for (const PixelPath & border : trace_polygons(class_mask(clean, RasterClass::kPedCrossing))) {
    if (border.pixels.size() < 3) {
      continue;
    }
    std::vector<Point2> ring = rdp_iterative(pixels_to_points(border, ext_spec), params.eps1, params.max_points, true).points;
    if (ring.size() < 3 || ring_area(ring) == 0.0) {
      continue;
    }
    MapElement e;
    e.cls = MapClass::kPedCrossing;
    e.kind = ElementKind::kPolygon;
    e.points = std::move(ring);
    crossings.push_back(std::move(e));
  }

  dividers = filter_dividers(dividers, boundaries, crossings, params.gate);

  VectorMap full;
  full.frame = frame;
  full.bev_range = ext_spec;
  for (auto * group : {&crossings, &dividers, &boundaries}) {
    for (auto & e : *group) {
      full.elements.push_back(std::move(e));
    }
  }
  VectorizeResult result;
  result.map = crop_to_range(full, raster.spec);
  result.map.frame = frame;
  result.mask = observed_mask(crop_margin(clean, margin_px, raster.spec));
  return result;
}

}  // namespace pseudomap
