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

#ifndef PSEUDOMAP__TESTS__GRADIENT_CHECKS_HPP_
#define PSEUDOMAP__TESTS__GRADIENT_CHECKS_HPP_

#include <algorithm>
#include <functional>
#include <vector>

#include "pseudomap/loss.hpp"
#include "support.hpp"

namespace pseudomap::test
{

inline constexpr double kFdStep = 1e-5;

inline double central_difference(const std::function<double(double)> & f, double x0, double h = kFdStep)
{
  return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

struct GradCheck
{
  int configs = 0;
  int rejected = 0;  // configurations too close to a non-smooth locus
  double max_rel_err = 0.0;
};

/// Central differences over every point coordinate of `e`.
inline double max_point_grad_error(
  MapElement e, const std::vector<Point2> & analytic, const std::function<double(const MapElement &)> & loss)
{
  double worst = 0.0;
  for (std::size_t l = 0; l < e.points.size(); ++l) {
    for (int axis = 0; axis < 2; ++axis) {
      double & coord = axis == 0 ? e.points[l].x : e.points[l].y;
      const double saved = coord;
      const double numeric = central_difference(
        [&](double v) {
          coord = v;
          return loss(e);
        },
        saved);
      coord = saved;
      const double a = axis == 0 ? analytic[l].x : analytic[l].y;
      worst = std::max(worst, rel_err(a, numeric));
    }
  }
  return worst;
}

/// True when some pixel whose value is not negligible sits within `margin`
/// of a tie between two different closest points of the element (the
/// Voronoi edges where the distance field has a kink).
inline bool near_voronoi_edge(const MapElement & e, const BevSpec & spec, double margin, double min_value, double sigma)
{
  const std::size_t n = e.points.size();
  const std::size_t edges = e.closed() && n >= 3 ? n : n - 1;
  const double reach = sigma * std::sqrt(-2.0 * std::log(min_value)) + 1.0;
  for (int r = 0; r < spec.height(); ++r) {
    for (int c = 0; c < spec.width(); ++c) {
      const Point2 p = spec.pixel_center(r, c);
      double d1 = 1e300;
      double d2 = 1e300;
      Point2 c1{};
      Point2 c2{};
      for (std::size_t s = 0; s < edges; ++s) {
        const Point2 a = e.points[s];
        const Point2 b = e.points[(s + 1) % n];
        const Point2 ab = b - a;
        const double len2 = dot(ab, ab);
        const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        const Point2 closest = a + t * ab;
        const double d = distance(p, closest);
        if (d < d1) {
          if (distance(closest, c1) > 1e-9) {
            d2 = d1;
            c2 = c1;
          }
          d1 = d;
          c1 = closest;
        } else if (d < d2 && distance(closest, c1) > 1e-9) {
          d2 = d;
          c2 = closest;
        }
      }
      // Near-ties whose closest points are seen from the pixel in almost the
      // same direction (the two sides of a straight joint) are smooth.
      const bool kink = d1 > 1e-9 && dot((1.0 / d1) * (p - c1), (1.0 / d2) * (p - c2)) < 1.0 - 1e-3;
      if (d1 < reach && d2 - d1 < margin && kink) {
        return true;
      }
    }
  }
  return false;
}

inline MapElement random_element(Rng & rng, bool polygon_kind, double extent)
{
  if (polygon_kind) {
    // Star-shaped ring so that it stays simple.
    const int n = uniform_int(rng, 3, 6);
    const Point2 c{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    std::vector<Point2> pts;
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + uniform(rng, 0.1, 0.9)) / n;
      const double rad = uniform(rng, 1.0, extent);
      pts.push_back(c + Point2{rad * std::cos(a), rad * std::sin(a)});
    }
    return polygon(pts);
  }
  return polyline(MapClass::kDivider, random_polyline(rng, uniform_int(rng, 2, 5), extent, 0.8));
}

inline GradCheck check_focal_gradients(Rng & rng, int n)
{
  GradCheck out;
  while (out.configs < n) {
    const int k = uniform_int(rng, 2, 5);
    std::vector<double> p(k);
    double sum = 0.0;
    for (double & v : p) {
      v = uniform(rng, 0.05, 1.0);
      sum += v;
    }
    for (double & v : p) {
      v /= sum;
    }
    const int cls = uniform_int(rng, 0, k - 1);
    const double alpha = uniform(rng, 0.1, 1.0);
    const double gamma = uniform(rng, 0.0, 3.0);
    const ScalarGrad f = focal_loss(p, cls, alpha, gamma);
    for (int j = 0; j < k; ++j) {
      std::vector<double> q = p;
      const double numeric = central_difference(
        [&](double v) {
          q[j] = v;
          return focal_loss(q, cls, alpha, gamma).value;
        },
        p[j]);
      out.max_rel_err = std::max(out.max_rel_err, rel_err(f.grad[j], numeric));
    }
    ++out.configs;
  }
  return out;
}

inline GradCheck check_l1_gradients(Rng & rng, int n)
{
  GradCheck out;
  while (out.configs < n) {
    const bool poly = uniform_int(rng, 0, 2) == 0;
    MapElement g = resample(random_element(rng, poly, 4.0), 20);
    MapElement q = g;
    for (Point2 & p : q.points) {
      p = p + Point2{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    }
    const L1Result r = pointwise_l1(q, g);
    // Non-smooth where a coordinate difference vanishes or two orderings tie.
    bool ok = true;
    const auto orders = equivalent_orderings(g);
    for (std::size_t l = 0; l < q.points.size(); ++l) {
      const Point2 d = q.points[l] - orders[r.ordering][l];
      ok = ok && std::abs(d.x) > 10.0 * kFdStep && std::abs(d.y) > 10.0 * kFdStep;
    }
    for (std::size_t o = 0; o < orders.size(); ++o) {
      if (o == r.ordering) {
        continue;
      }
      double sum = 0.0;
      for (std::size_t l = 0; l < q.points.size(); ++l) {
        sum += std::abs(q.points[l].x - orders[o][l].x) + std::abs(q.points[l].y - orders[o][l].y);
      }
      ok = ok && sum - r.value > 40.0 * 10.0 * kFdStep;
    }
    if (!ok) {
      ++out.rejected;
      continue;
    }
    out.max_rel_err = std::max(
      out.max_rel_err, max_point_grad_error(q, r.grad, [&](const MapElement & e) { return pointwise_l1(e, g).value; }));
    ++out.configs;
  }
  return out;
}

/// Jacobian of single pixel values, ten random pixels per configuration.
inline GradCheck check_soft_raster_gradients(Rng & rng, int n)
{
  GradCheck out;
  const BevSpec spec{-6.0, 6.0, -6.0, 6.0, 5.0};
  SoftRasterParams params;
  while (out.configs < n) {
    const bool poly = uniform_int(rng, 0, 2) == 0;
    params.sigma = uniform(rng, 0.2, 0.6);
    params.band_width = poly ? uniform(rng, 0.0, 0.3) : 0.05;
    const MapElement e = random_element(rng, poly, 4.0);
    const SoftRasterization sr = soft_rasterize(e, spec, params);
    std::vector<std::size_t> pixels;
    for (int attempt = 0; attempt < 2000 && pixels.size() < 10; ++attempt) {
      const std::size_t i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(sr.raster.values.size()) - 1));
      const double v = sr.raster.values[i];
      const double half_band = poly ? 0.5 * params.band_width : 0.0;
      // Informative pixels away from the band edge.
      if (v < 1e-6 || std::abs(sr.dist[i] - half_band) < 1e-3) {
        continue;
      }
      // Away from Voronoi edges: single-pixel check on a 1x1 window.
      const Point2 p = spec.pixel_center(static_cast<int>(i) / sr.raster.width, static_cast<int>(i) % sr.raster.width);
      const BevSpec one{p.x - 0.5 / spec.resolution, p.x + 0.5 / spec.resolution, p.y - 0.5 / spec.resolution,
        p.y + 0.5 / spec.resolution, spec.resolution};
      if (near_voronoi_edge(e, one, 10.0 * kFdStep, 1e-300, params.sigma)) {
        continue;
      }
      pixels.push_back(i);
    }
    if (pixels.size() < 10) {
      ++out.rejected;
      continue;
    }
    for (std::size_t i : pixels) {
      std::vector<double> onehot(sr.raster.values.size(), 0.0);
      onehot[i] = 1.0;
      const std::vector<Point2> grad = soft_raster_backprop(sr, e, params, onehot);
      out.max_rel_err = std::max(out.max_rel_err, max_point_grad_error(e, grad, [&](const MapElement & m) {
        return soft_rasterize(m, spec, params).raster.values[i];
      }));
    }
    ++out.configs;
  }
  return out;
}

inline GradCheck check_dice_gradients(Rng & rng, int n)
{
  GradCheck out;
  const BevSpec spec{0.0, 4.0, 0.0, 4.0, 4.0};
  while (out.configs < n) {
    SoftRaster pred(spec);
    SoftRaster target(spec);
    BevMask mask(spec, true);
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      pred.values[i] = uniform(rng, 0.0, 1.0);
      target.values[i] = uniform(rng, 0.0, 1.0);
      mask.grid.bits[i] = uniform(rng, 0.0, 1.0) < 0.7 ? 1 : 0;
    }
    const ScalarGrad d = dice_loss(pred, target, mask);
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      SoftRaster p2 = pred;
      const double numeric = central_difference(
        [&](double v) {
          p2.values[i] = v;
          return dice_loss(p2, target, mask).value;
        },
        pred.values[i]);
      out.max_rel_err = std::max(out.max_rel_err, rel_err(d.grad[i], numeric));
    }
    ++out.configs;
  }
  return out;
}

inline GradCheck check_render_gradients(Rng & rng, int n)
{
  GradCheck out;
  const BevSpec spec{-6.0, 6.0, -6.0, 6.0, 5.0};
  SoftRasterParams params;
  while (out.configs < n) {
    const bool poly = uniform_int(rng, 0, 3) == 0;
    const MapElement q = random_element(rng, poly, 4.0);
    std::vector<MapElement> labels;
    const int k = uniform_int(rng, 1, 2);
    for (int j = 0; j < k; ++j) {
      MapElement g = q;
      for (Point2 & p : g.points) {
        p = p + Point2{uniform(rng, -0.7, 0.7), uniform(rng, -0.7, 0.7)};
      }
      labels.push_back(g);
    }
    BevMask mask(spec, true);
    for (int r = 0; r < mask.height(); ++r) {
      for (int c = 0; c < mask.width() / 3; ++c) {
        mask.grid.at(r, c) = 0;
      }
    }
    if (near_voronoi_edge(q, spec, 10.0 * kFdStep, 1e-12, params.sigma)) {
      ++out.rejected;
      continue;
    }
    const PointGrad rl = render_loss(q, labels, mask, params);
    out.max_rel_err = std::max(out.max_rel_err, max_point_grad_error(q, rl.grad, [&](const MapElement & m) {
      return render_loss(m, labels, mask, params).value;
    }));
    ++out.configs;
  }
  return out;
}

inline GradCheck check_direction_gradients(Rng & rng, int n)
{
  GradCheck out;
  while (out.configs < n) {
    const bool poly = uniform_int(rng, 0, 2) == 0;
    MapElement q = random_element(rng, poly, 5.0);
    if (q.points.size() < 3) {
      q.points.push_back(q.points.back() + Point2{uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0)});
    }
    // Straight turns (cos = +-1) have a vanishing gradient that is still
    // smooth; degenerate zero-length edges are avoided by construction.
    const PointGrad d = direction_loss(q);
    out.max_rel_err = std::max(
      out.max_rel_err, max_point_grad_error(q, d.grad, [](const MapElement & m) { return direction_loss(m).value; }));
    ++out.configs;
  }
  return out;
}

}  // namespace pseudomap::test

#endif  // PSEUDOMAP__TESTS__GRADIENT_CHECKS_HPP_
