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

#include <algorithm>
#include <set>

#include "pseudomap/error.hpp"
#include "pseudomap/geometry.hpp"
#include "support.hpp"

namespace pseudomap
{
namespace
{

using test::polygon;
using test::polyline;

// Walks the polyline to arc position s.
Point2 walk(const std::vector<Point2> & pts, double s)
{
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = distance(pts[i], pts[i + 1]);
    if (s <= len || i + 2 == pts.size()) {
      const double f = len > 0.0 ? std::min(s / len, 1.0) : 0.0;
      return pts[i] + f * (pts[i + 1] - pts[i]);
    }
    s -= len;
  }
  return pts.back();
}

bool inside(Point2 p, const BevSpec & s, double tol)
{
  return p.x >= s.x_min - tol && p.x <= s.x_max + tol && p.y >= s.y_min - tol && p.y <= s.y_max + tol;
}

}  // namespace

TEST_SUITE("geometry")
{
  TEST_CASE("resample keeps endpoints and spaces points uniformly")
  {
    const std::vector<Point2> seg{{0, 0}, {0, 10}};
    const auto out = resample(seg, 3);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == Point2{0, 0});
    CHECK(out[1] == Point2{0, 5});
    CHECK(out[2] == Point2{0, 10});
  }

  TEST_CASE("resample of collinear uniform points is the identity")
  {
    const std::vector<Point2> pts{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
    const auto out = resample(pts, 4);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(distance(out[i], pts[i]) < 1e-12);
    }
  }

  TEST_CASE("resample of an L-shaped path matches an arc-length walk")
  {
    const std::vector<Point2> path{{0, 0}, {0, 6}, {4, 6}};
    const auto out = resample(path, 6);
    REQUIRE(out.size() == 6);
    for (int k = 0; k < 6; ++k) {
      const Point2 want = walk(path, 2.0 * k);
      CHECK(distance(out[k], want) < 1e-12);
    }
    CHECK(out[3] == Point2{0, 6});
  }

  TEST_CASE("closed resampling includes the closing edge")
  {
    const std::vector<Point2> square{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    const auto out = resample(square, 8, true);
    REQUIRE(out.size() == 8);
    for (int k = 0; k < 8; ++k) {
      const std::vector<Point2> ring{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}};
      CHECK(distance(out[k], walk(ring, k * 1.0)) < 1e-12);
    }
  }

  TEST_CASE("resample rejects zero-length input")
  {
    const std::vector<Point2> pts{{1, 1}, {1, 1}};
    CHECK_THROWS_AS(resample(pts, 5), Error);
    try {
      resample(pts, 5);
    } catch (const Error & e) {
      CHECK(e.code() == ErrorCode::kDegenerateGeometry);
      CHECK(std::string(e.what()) == "degenerate geometry");
    }
  }

  TEST_CASE("resample is idempotent on uniform polylines")
  {
    test::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      // Equal-length steps with random turns: already arc-length uniform.
      const int n = test::uniform_int(rng, 2, 30);
      const double step = test::uniform(rng, 0.1, 3.0);
      std::vector<Point2> pts{{test::uniform(rng, -5, 5), test::uniform(rng, -5, 5)}};
      double heading = test::uniform(rng, -3, 3);
      while (static_cast<int>(pts.size()) < n) {
        heading += test::uniform(rng, -1.0, 1.0);
        pts.push_back(pts.back() + step * Point2{std::cos(heading), std::sin(heading)});
      }
      const auto out = resample(pts, pts.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        worst = std::max(worst, distance(out[i], pts[i]));
      }
      CHECK(worst < 1e-9);
    }
  }

  TEST_CASE("chamfer distance basics")
  {
    const MapElement a = polyline(MapClass::kDivider, {{0, 0}, {10, 0}});
    CHECK(chamfer_distance(a, a) == 0.0);
    const MapElement b = polyline(MapClass::kDivider, {{0, 1}, {10, 1}});
    CHECK(chamfer_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("chamfer distance matches a dense pairwise oracle")
  {
    const MapElement a = polyline(MapClass::kDivider, {{0, 0}, {10, 0}});
    const MapElement b = polyline(MapClass::kDivider, {{0, 1}, {10, 3}});
    const int n = 100;
    std::vector<Point2> sa, sb;
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      sa.push_back({10 * t, 0});
      sb.push_back({10 * t, 1 + 2 * t});
    }
    auto directed = [](const std::vector<Point2> & from, const std::vector<Point2> & to) {
      double sum = 0.0;
      for (const Point2 & p : from) {
        double best = 1e300;
        for (const Point2 & q : to) {
          best = std::min(best, distance(p, q));
        }
        sum += best;
      }
      return sum / static_cast<double>(from.size());
    };
    const double oracle = 0.5 * (directed(sa, sb) + directed(sb, sa));
    CHECK(chamfer_distance(a, b, n) == doctest::Approx(oracle).epsilon(1e-12));
  }

  TEST_CASE("chamfer distance is symmetric and ordering invariant")
  {
    test::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const bool closed = trial % 2 == 1;
      MapElement a = closed ? polygon(test::random_polyline(rng, 4, 10.0))
                            : polyline(MapClass::kBoundary, test::random_polyline(rng, 5, 10.0));
      MapElement b = closed ? polygon(test::random_polyline(rng, 4, 10.0))
                            : polyline(MapClass::kBoundary, test::random_polyline(rng, 5, 10.0));
      const double ab = chamfer_distance(a, b);
      CHECK(ab == chamfer_distance(b, a));
      for (const auto & order : equivalent_orderings(b)) {
        MapElement b2 = b;
        b2.points = order;
        CHECK(chamfer_distance(a, b2) == ab);
      }
    }
  }

  TEST_CASE("crop keeps inside elements and clips crossing segments")
  {
    const BevSpec spec;
    VectorMap m;
    m.bev_range = spec;
    m.elements.push_back(polyline(MapClass::kDivider, {{0, 0}, {1, 5}}));
    m.elements.push_back(polyline(MapClass::kDivider, {{0, 0}, {0, 50}}));
    const VectorMap out = crop_to_range(m, spec);
    REQUIRE(out.elements.size() == 2);
    CHECK(out.elements[0] == m.elements[0]);
    REQUIRE(out.elements[1].points.size() == 2);
    CHECK(out.elements[1].points[1].y == doctest::Approx(30.0));
  }

  TEST_CASE("crop splits a U-shaped polyline into two fragments")
  {
    const BevSpec spec;
    VectorMap m;
    m.elements.push_back(polyline(MapClass::kBoundary, {{-5, 10}, {-5, 40}, {5, 40}, {5, 10}}));
    const VectorMap out = crop_to_range(m, spec);
    REQUIRE(out.elements.size() == 2);
    CHECK(out.elements[0].points == std::vector<Point2>{{-5, 10}, {-5, 30}});
    CHECK(out.elements[1].points == std::vector<Point2>{{5, 30}, {5, 10}});
  }

  TEST_CASE("crop agrees with a dense half-plane sampling oracle")
  {
    const BevSpec spec{-10, 10, -10, 10, 10};
    test::Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const auto pts = test::random_polyline(rng, test::uniform_int(rng, 2, 6), 18.0);
      const auto frags = clip_polyline(pts, spec);
      // Every output point is inside.
      for (const auto & f : frags) {
        CHECK(f.size() >= 2);
        for (const Point2 & p : f) {
          CHECK(inside(p, spec, 1e-9));
        }
      }
      // Dense samples: inside samples lie on some fragment, and the number
      // of inside runs equals the fragment count.
      int runs = 0;
      bool prev = false;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        for (int k = 0; k < 400; ++k) {
          const Point2 p = pts[i] + (k / 400.0) * (pts[i + 1] - pts[i]);
          const bool in = inside(p, spec, -1e-6);
          if (in) {
            double best = 1e300;
            for (const auto & f : frags) {
              best = std::min(best, point_polyline_distance(p, f, false));
            }
            CHECK(best < 1e-9);
          }
          runs += (in && !prev) ? 1 : 0;
          prev = in || (prev && inside(p, spec, 1e-6));
        }
      }
      CHECK(static_cast<int>(frags.size()) == runs);
    }
  }

  TEST_CASE("crop output satisfies the rectangle bounds")
  {
    const BevSpec spec;
    test::Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      VectorMap m;
      m.elements.push_back(polyline(MapClass::kDivider, test::random_polyline(rng, 6, 45.0)));
      m.elements.push_back(polygon(test::random_polyline(rng, 5, 40.0)));
      for (const MapElement & e : crop_to_range(m, spec).elements) {
        for (const Point2 & p : e.points) {
          CHECK(inside(p, spec, 1e-9));
        }
      }
    }
  }

  TEST_CASE("polygon clipping intersects with the rectangle")
  {
    const BevSpec spec{-10, 10, -10, 10, 10};
    const std::vector<Point2> sq{{5, 5}, {15, 5}, {15, 15}, {5, 15}};
    const auto out = clip_polygon(sq, spec);
    std::set<std::pair<double, double>> got;
    for (const Point2 & p : out) {
      got.insert({p.x, p.y});
    }
    CHECK(got == std::set<std::pair<double, double>>{{5, 5}, {10, 5}, {10, 10}, {5, 10}});
  }

  TEST_CASE("equivalent orderings")
  {
    const MapElement line = polyline(MapClass::kDivider, {{0, 0}, {1, 0}, {2, 1}});
    const auto lo = equivalent_orderings(line);
    CHECK(lo.size() == 2);
    CHECK(lo[1] == std::vector<Point2>{{2, 1}, {1, 0}, {0, 0}});

    const MapElement quad = polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto qo = equivalent_orderings(quad);
    CHECK(qo.size() == 8);
    std::set<std::vector<std::pair<double, double>>> distinct;
    for (const auto & o : qo) {
      std::vector<std::pair<double, double>> v;
      for (const Point2 & p : o) {
        v.push_back({p.x, p.y});
      }
      distinct.insert(v);
    }
    CHECK(distinct.size() == 8);

    // Reversing a reversed ordering gives back the original.
    auto rev = lo[1];
    std::reverse(rev.begin(), rev.end());
    CHECK(rev == line.points);
  }

  TEST_CASE("canonical ordering is shared by every equivalent ordering")
  {
    test::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const MapElement e = trial % 2 ? polygon(test::random_polyline(rng, 5, 5.0))
                                     : polyline(MapClass::kDivider, test::random_polyline(rng, 5, 5.0));
      const auto canon = canonical_ordering(e);
      for (const auto & o : equivalent_orderings(e)) {
        MapElement e2 = e;
        e2.points = o;
        CHECK(canonical_ordering(e2) == canon);
      }
    }
  }

  TEST_CASE("element validation")
  {
    CHECK_NOTHROW(validate_element(polyline(MapClass::kDivider, {{0, 0}, {1, 0}})));
    CHECK_THROWS_AS(validate_element(polyline(MapClass::kDivider, {{0, 0}})), Error);
    CHECK_THROWS_AS(validate_element(polygon({{0, 0}, {1, 0}})), Error);
    CHECK_THROWS_AS(validate_element(polygon({{0, 0}, {1, 0}, {1, 1}, {0, 0}})), Error);
    MapElement wrong = polyline(MapClass::kPedCrossing, {{0, 0}, {1, 0}, {1, 1}});
    CHECK_THROWS_AS(validate_element(wrong), Error);
    MapElement conf = polyline(MapClass::kDivider, {{0, 0}, {1, 0}}, 1.5);
    CHECK_THROWS_AS(validate_element(conf), Error);
  }

  TEST_CASE("bev spec grid dimensions")
  {
    const BevSpec spec;
    CHECK(spec.width() == 600);
    CHECK(spec.height() == 1200);
    CHECK(spec.pixel_center(0, 0).x == doctest::Approx(-14.975));
    CHECK(spec.pixel_center(0, 0).y == doctest::Approx(29.975));
    BevSpec bad{0, 1.03, 0, 1, 10};
    CHECK_THROWS_AS(bad.validate(), Error);
    BevSpec inverted{1, 0, 0, 1, 10};
    CHECK_THROWS_AS(inverted.validate(), Error);
  }

  TEST_CASE("angles wrap into (-pi, pi]")
  {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
    const Pose2 p{1, 2, 0.3};
    const Point2 q{4, -1};
    const Point2 back = p.to_local(p.to_world(q));
    CHECK(distance(back, q) < 1e-12);
  }
}

}  // namespace pseudomap
