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

#include <doctest.h>

#include <set>

#include "pseudomap/error.hpp"
#include "pseudomap/metrics.hpp"
#include "pseudomap/synth.hpp"
#include "pseudomap/vectorize.hpp"
#include "support.hpp"

namespace pseudomap
{
namespace
{

using test::Rng;

bool adjacent8(Pixel a, Pixel b)
{
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return std::max(dr, dc) == 1;
}

void check_path_shape(const PixelPath & p)
{
  std::set<Pixel> seen;
  for (std::size_t i = 0; i < p.pixels.size(); ++i) {
    CHECK(seen.insert(p.pixels[i]).second);
    if (i > 0) {
      CHECK(adjacent8(p.pixels[i - 1], p.pixels[i]));
    }
  }
}

// Sizes of the 8-connected groups of set pixels.
std::vector<int> group_sizes(const BinaryGrid & g)
{
  std::vector<int> sizes;
  std::vector<std::uint8_t> seen(g.bits.size(), 0);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (!g.at(r, c) || seen[r * g.width + c]) {
        continue;
      }
      std::vector<std::pair<int, int>> stack{{r, c}};
      seen[r * g.width + c] = 1;
      int n = 0;
      while (!stack.empty()) {
        const auto [y, x] = stack.back();
        stack.pop_back();
        ++n;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (g.get(y + dy, x + dx) && !seen[(y + dy) * g.width + x + dx]) {
              seen[(y + dy) * g.width + x + dx] = 1;
              stack.push_back({y + dy, x + dx});
            }
          }
        }
      }
      sizes.push_back(n);
    }
  }
  return sizes;
}

double dist_to_polyline(Point2 p, const std::vector<Point2> & pts)
{
  return point_polyline_distance(p, pts, false);
}

bool is_subsequence(const std::vector<Point2> & sub, std::span<const Point2> full)
{
  std::size_t j = 0;
  for (const Point2 & p : full) {
    if (j < sub.size() && sub[j] == p) {
      ++j;
    }
  }
  return j == sub.size();
}

}  // namespace

TEST_SUITE("vectorize")
{
  TEST_CASE("trace_lines straight line covers every pixel")
  {
    BinaryGrid g(40, 10);
    for (int c = 3; c < 37; ++c) {
      g.at(5, c) = 1;
    }
    const auto paths = trace_lines(g);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].pixels.size() == 34);
    CHECK(paths[0].pixels.front() == Pixel{5, 3});
    check_path_shape(paths[0]);
  }

  TEST_CASE("trace_lines Y shape keeps the longest path")
  {
    // Arms of 30, 30 and 10 pixels meeting at one junction pixel.
    BinaryGrid g(100, 100);
    for (int c = 20; c <= 80; ++c) {
      g.at(50, c) = 1;
    }
    for (int r = 51; r <= 60; ++r) {
      g.at(r, 50) = 1;
    }
    const auto paths = trace_lines(g);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].pixels.size() == 61);
    CHECK(paths[1].pixels.size() == 10);
    for (const auto & p : paths) {
      check_path_shape(p);
    }
  }

  TEST_CASE("trace_lines opens a ring at its smallest pixel")
  {
    BinaryGrid g(30, 30);
    for (int k = 5; k <= 24; ++k) {
      g.at(5, k) = g.at(24, k) = g.at(k, 5) = g.at(k, 24) = 1;
    }
    // Cut corners so that every pixel has exactly two neighbours.
    g.at(5, 5) = g.at(5, 24) = g.at(24, 5) = g.at(24, 24) = 0;
    const auto paths = trace_lines(g);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].pixels.size() == g.count());
    const bool starts_or_ends_at_min =
      paths[0].pixels.front() == Pixel{5, 6} || paths[0].pixels.back() == Pixel{5, 6};
    CHECK(starts_or_ends_at_min);
    CHECK(adjacent8(paths[0].pixels.front(), paths[0].pixels.back()));
    check_path_shape(paths[0]);
  }

  TEST_CASE("trace_lines covers the skeleton except short leftovers")
  {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      const BinaryGrid skel = skeletonize(test::random_grid(rng, 40, 40, 0.55));
      const auto paths = trace_lines(skel, kMinBranchPixels);
      BinaryGrid left = skel;
      for (const auto & p : paths) {
        check_path_shape(p);
        for (const Pixel & px : p.pixels) {
          REQUIRE(skel.at(px.row, px.col));
          CHECK(left.at(px.row, px.col) == 1);  // paths are disjoint
          left.at(px.row, px.col) = 0;
        }
      }
      for (int n : group_sizes(left)) {
        CHECK(n < kMinBranchPixels);
      }
    }
  }

  TEST_CASE("rdp examples")
  {
    std::vector<Point2> line;
    for (int i = 0; i <= 10; ++i) {
      line.push_back({0.5 * i, 0.25 * i});
    }
    CHECK(rdp(line, 1e-9) == std::vector<Point2>{line.front(), line.back()});
    CHECK(rdp_iterative(line, 0.01, 20).points.size() == 2);

    const std::vector<Point2> corner{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}};
    const auto r = rdp_iterative(corner, 0.1, 20);
    CHECK(r.points == std::vector<Point2>{{0, 0}, {2, 0}, {2, 2}});
    CHECK(r.epsilon == 0.1);

    CHECK_THROWS_AS(rdp_iterative(corner, 0.0, 20), Error);
  }

  TEST_CASE("rdp_iterative on a noisy arc stays within its final tolerance")
  {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<Point2> arc;
      const double radius = test::uniform(rng, 5.0, 30.0);
      const int n = 400;
      for (int i = 0; i < n; ++i) {
        const double a = 1.5 * i / (n - 1);
        const double rr = radius + test::uniform(rng, -0.02, 0.02);
        arc.push_back({rr * std::cos(a), rr * std::sin(a)});
      }
      const auto res = rdp_iterative(arc, 0.05, 20);
      CHECK(res.points.size() <= 20);
      CHECK(res.points.front() == arc.front());
      CHECK(res.points.back() == arc.back());
      CHECK(is_subsequence(res.points, arc));
      // Dense sampling: every input point and the midpoints between them.
      double worst = 0.0;
      for (std::size_t i = 0; i < arc.size(); ++i) {
        worst = std::max(worst, dist_to_polyline(arc[i], res.points));
      }
      CHECK(worst <= res.epsilon + 1e-12);
      // The previous tolerance would not have been enough.
      if (res.epsilon > 0.05) {
        CHECK(rdp(arc, res.epsilon - 0.05).size() > 20);
      }
    }
  }

  TEST_CASE("rdp_iterative output is a bounded subsequence")
  {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const auto pts = test::random_polyline(rng, test::uniform_int(rng, 2, 80), 10.0, 0.01);
      const std::size_t L = static_cast<std::size_t>(test::uniform_int(rng, 2, 25));
      const bool closed = pts.size() >= 3 && trial % 2 == 0;
      const auto res = rdp_iterative(pts, 0.05, L, closed);
      CHECK(res.points.size() <= std::max<std::size_t>(L, 2));
      CHECK(is_subsequence(res.points, pts));
      CHECK(res.points.front() == pts.front());
      if (!closed) {
        CHECK(res.points.back() == pts.back());
      }
    }
  }

  TEST_CASE("trace_polygons square and empty grid")
  {
    CHECK(trace_polygons(BinaryGrid(12, 12)).empty());

    BinaryGrid g(20, 20);
    for (int r = 5; r < 15; ++r) {
      for (int c = 5; c < 15; ++c) {
        g.at(r, c) = 1;
      }
    }
    const auto borders = trace_polygons(g);
    REQUIRE(borders.size() == 1);
    CHECK(borders[0].closed);
    CHECK(borders[0].pixels.size() == 36);
    for (const Pixel & p : borders[0].pixels) {
      const bool on_border = p.row == 5 || p.row == 14 || p.col == 5 || p.col == 14;
      CHECK(on_border);
    }
    const BevSpec spec{0, 20, 0, 20, 1};
    const auto ring = rdp_iterative(pixels_to_points(borders[0], spec), 0.5, 20, true).points;
    const std::set<std::pair<double, double>> got = [&] {
      std::set<std::pair<double, double>> s;
      for (auto p : ring) {
        s.insert({p.x, p.y});
      }
      return s;
    }();
    const std::set<std::pair<double, double>> want{{5.5, 14.5}, {14.5, 14.5}, {5.5, 5.5}, {14.5, 5.5}};
    CHECK(got == want);
  }

  TEST_CASE("trace_polygons L shape against a boundary walk")
  {
    BinaryGrid g(20, 20);
    for (int r = 2; r < 12; ++r) {
      for (int c = 2; c < 6; ++c) {
        g.at(r, c) = 1;
      }
    }
    for (int r = 8; r < 12; ++r) {
      for (int c = 6; c < 12; ++c) {
        g.at(r, c) = 1;
      }
    }
    // Oracle corners: border pixels (some 8-neighbour is background) whose
    // border neighbours along rows and columns turn the walk by 90 degrees.
    auto border = [&](int r, int c) {
      if (!g.get(r, c)) {
        return false;
      }
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!g.get(r + dy, c + dx)) {
            return true;
          }
        }
      }
      return false;
    };
    std::vector<Pixel> corners;
    for (int r = 0; r < 20; ++r) {
      for (int c = 0; c < 20; ++c) {
        if (!border(r, c)) {
          continue;
        }
        const bool horiz = border(r, c - 1) || border(r, c + 1);
        const bool vert = border(r - 1, c) || border(r + 1, c);
        const bool straight = (border(r, c - 1) && border(r, c + 1)) || (border(r - 1, c) && border(r + 1, c));
        if (horiz && vert && !straight) {
          corners.push_back({r, c});
        }
      }
    }
    REQUIRE(corners.size() == 6);

    const auto borders = trace_polygons(g);
    REQUIRE(borders.size() == 1);
    const BevSpec spec{0, 20, 0, 20, 1};
    const auto ring = rdp_iterative(pixels_to_points(borders[0], spec), 1.0, 20, true).points;
    CHECK(ring.size() == 6);
    // 8-connected following cuts the concave corner diagonally, so vertices
    // land within one pixel of the oracle corners.
    for (const Pixel & c : corners) {
      const Point2 want = spec.pixel_center(c.row, c.col);
      double best = 1e9;
      for (const Point2 & p : ring) {
        best = std::min(best, distance(p, want));
      }
      CHECK(best <= 1.0);
    }
  }

  TEST_CASE("trace_polygons ignores holes and separates components")
  {
    BinaryGrid g(30, 30);
    for (int r = 2; r < 14; ++r) {
      for (int c = 2; c < 14; ++c) {
        g.at(r, c) = (r > 5 && r < 10 && c > 5 && c < 10) ? 0 : 1;
      }
    }
    g.at(20, 20) = 1;
    for (int c = 18; c < 28; ++c) {
      g.at(25, c) = 1;
    }
    const auto borders = trace_polygons(g);
    REQUIRE(borders.size() == 3);
    CHECK(borders[0].pixels.size() == 44);
    CHECK(borders[1].pixels.size() == 1);
    for (const auto & b : borders) {
      for (std::size_t i = 1; i < b.pixels.size(); ++i) {
        CHECK(adjacent8(b.pixels[i - 1], b.pixels[i]));
      }
    }
  }

  TEST_CASE("filter_dividers examples")
  {
    const DividerGate gate;  // 0.5 m, 10 degrees
    const MapElement boundary = test::polyline(MapClass::kBoundary, {{0, 0}, {0, 10}});

    const MapElement close_parallel = test::polyline(MapClass::kDivider, {{0.1, 0.5}, {0.1, 9.5}});
    CHECK(filter_dividers({close_parallel}, {boundary}, {}, gate).empty());

    const MapElement perpendicular = test::polyline(MapClass::kDivider, {{-3, 5}, {3, 5}});
    CHECK(filter_dividers({perpendicular}, {boundary}, {}, gate).size() == 1);

    // Parallel for the first 40 % of its length, then turning away.
    const MapElement partial = test::polyline(MapClass::kDivider, {{0.1, 0}, {0.1, 4}, {6.1, 4}});
    const auto s = resample(partial.points, kDividerFilterSamples);
    std::vector<Point2> dense;
    for (int i = 0; i <= 10000; ++i) {
      dense.push_back({0.0, 10.0 * i / 10000});
    }
    int gated = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      double d = 1e9;
      for (auto q : dense) {
        d = std::min(d, distance(q, s[k]));
      }
      const Point2 t = s[std::min(k + 1, s.size() - 1)] - s[k == 0 ? 0 : k - 1];
      const double angle = std::atan2(std::abs(t.x), std::abs(t.y));  // against the y axis
      if (d <= gate.distance + 1e-4 && angle <= gate.angle) {
        ++gated;
      }
    }
    CHECK(gated < 25);
    CHECK(gated >= 15);
    CHECK(filter_dividers({partial}, {boundary}, {}, gate).size() == 1);

    // A crossing edge gates as well.
    const MapElement crossing = test::polygon({{-2, 3}, {2, 3}, {2, 6}, {-2, 6}});
    const MapElement along_edge = test::polyline(MapClass::kDivider, {{-1.5, 3.2}, {1.5, 3.2}});
    CHECK(filter_dividers({along_edge}, {}, {crossing}, gate).empty());
    CHECK(filter_dividers({along_edge}, {}, {}, gate).size() == 1);
  }

  TEST_CASE("vectorize_bev on an all unobserved raster")
  {
    const BevSpec spec{-5, 5, -5, 5, 10};
    const SemanticRaster r(spec, RasterClass::kUnobserved);
    const auto res = vectorize_bev(r, VectorizeParams{});
    CHECK(res.map.elements.empty());
    CHECK(coverage_ratio(res.mask) == 0.0);
    CHECK(res.mask.spec == spec);
  }

  TEST_CASE("vectorize_bev round trip on synthetic scenes")
  {
    // Every ground truth element has a same-class output within two pixels
    // (Chamfer), and every output lies within the window.
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      SceneParams p;
      p.seed = seed;
      p.n_lanes = 2 + static_cast<int>(seed % 3);
      p.curvature = (static_cast<int>(seed % 3) - 1) * 0.01;
      p.n_crossings = static_cast<int>(seed % 3);
      const VectorMap gt = gen_scene(p);
      const SemanticRaster raster = rasterize_gt(gt, p.spec, p.dash);
      const auto res = vectorize_bev(raster, VectorizeParams{}, "f");
      CHECK(res.map.frame == "f");
      CHECK(res.map.bev_range == p.spec);
      CHECK(coverage_ratio(res.mask) == 1.0);
      const double tol = 2.0 / p.spec.resolution;
      for (const MapElement & g : gt.elements) {
        double best = 1e9;
        for (const MapElement & q : res.map.elements) {
          if (q.cls == g.cls) {
            best = std::min(best, chamfer_distance(g, q));
          }
        }
        CHECK_MESSAGE(best <= tol, "seed ", seed, " class ", to_string(g.cls), " chamfer ", best);
      }
      for (const MapElement & q : res.map.elements) {
        validate_element(q);
        CHECK(q.points.size() <= 20);
        for (const Point2 & pt : q.points) {
          CHECK(p.spec.contains(pt, 1e-9));
        }
      }
    }
  }

  TEST_CASE("vectorize_bev is deterministic")
  {
    SceneParams p;
    p.seed = 3;
    p.n_crossings = 2;
    const VectorMap gt = gen_scene(p);
    SemanticRaster raster = rasterize_gt(gt, p.spec, p.dash);
    // Knock out a block so the mask is non-trivial.
    for (int r = 300; r < 500; ++r) {
      for (int c = 100; c < 300; ++c) {
        raster.set(r, c, RasterClass::kUnobserved);
      }
    }
    const auto a = vectorize_bev(raster, VectorizeParams{});
    const auto b = vectorize_bev(raster, VectorizeParams{});
    CHECK(a.map == b.map);
    CHECK(a.mask == b.mask);
    CHECK(a.mask == observed_mask(raster));
  }

  TEST_CASE("vectorize params validation")
  {
    VectorizeParams p;
    p.eps1 = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.lane_kernel.size = 4;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.max_points = 2;
    CHECK_THROWS_AS(p.validate(), Error);
  }
}

}  // namespace pseudomap
