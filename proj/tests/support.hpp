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

#ifndef PSEUDOMAP__TESTS__SUPPORT_HPP_
#define PSEUDOMAP__TESTS__SUPPORT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap::test
{

using Rng = std::mt19937_64;

inline double uniform(Rng & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng & rng, int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline MapElement polyline(MapClass cls, std::vector<Point2> pts, std::optional<double> conf = std::nullopt)
{
  return {cls, ElementKind::kPolyline, std::move(pts), conf};
}

inline MapElement polygon(std::vector<Point2> pts, std::optional<double> conf = std::nullopt)
{
  return {MapClass::kPedCrossing, ElementKind::kPolygon, std::move(pts), conf};
}

/// Random polyline with segments at least `min_seg` long.
inline std::vector<Point2> random_polyline(Rng & rng, int n, double extent, double min_seg = 0.5)
{
  std::vector<Point2> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Point2 p{uniform(rng, -extent, extent), uniform(rng, -extent, extent)};
    if (pts.empty() || distance(p, pts.back()) >= min_seg) {
      pts.push_back(p);
    }
  }
  return pts;
}

inline BinaryGrid random_grid(Rng & rng, int w, int h, double density)
{
  BinaryGrid g(w, h);
  for (auto & b : g.bits) {
    b = uniform(rng, 0.0, 1.0) < density ? 1 : 0;
  }
  return g;
}

/// Relative error with an absolute floor so that near-zero derivatives
/// are compared on an absolute scale.
inline double rel_err(double analytic, double numeric, double floor = 1e-6)
{
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace pseudomap::test

#endif  // PSEUDOMAP__TESTS__SUPPORT_HPP_
