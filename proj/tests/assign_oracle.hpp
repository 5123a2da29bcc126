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

#ifndef PSEUDOMAP__TESTS__ASSIGN_ORACLE_HPP_
#define PSEUDOMAP__TESTS__ASSIGN_ORACLE_HPP_

#include <algorithm>
#include <bit>
#include <numeric>
#include <vector>

#include "pseudomap/assign.hpp"
#include "pseudomap/synth.hpp"
#include "pseudomap/vectorize.hpp"
#include "support.hpp"

namespace pseudomap::test
{

/// Cheapest local bijection segment -> subset by trying every permutation.
/// Returns large_cost when every pairing hits an infeasible entry.
inline double brute_o2m(
  const std::vector<MapElement> & segments, const std::vector<MapElement> & labels, const std::vector<int> & subset,
  const CostParams & params)
{
  if (segments.size() != subset.size() || subset.empty()) {
    return params.large_cost;
  }
  std::vector<int> perm(subset.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = params.large_cost;
  do {
    double sum = 0.0;
    bool ok = true;
    for (std::size_t m = 0; m < segments.size(); ++m) {
      const double c = cost_o2o(segments[m], labels[subset[perm[m]]], params);
      ok = ok && c < params.large_cost;
      sum += c;
    }
    if (ok) {
      best = std::min(best, sum);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct BruteResult
{
  bool feasible = false;
  double total = 0.0;
  double best_o2o_only = 0.0;  // best assignment using one-to-one matches only
  bool o2o_only_feasible = false;
};

/// Exhaustive search over every prediction's options: unassigned, one
/// label one-to-one, or a subset of |S^i| <= max_card labels one-to-many.
/// Costs are recomputed from the public cost functions.
inline BruteResult brute_force_assign(const AssignmentProblem & pb, const CostParams & params, std::size_t max_card)
{
  const std::size_t nq = pb.predictions.size();
  const std::size_t ng = pb.labels.size();
  struct Option
  {
    unsigned labels = 0;
    double cost = 0.0;
    bool o2o = true;
  };
  std::vector<std::vector<Option>> options(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    options[i].push_back({0u, 0.0, true});
    for (std::size_t j = 0; j < ng; ++j) {
      const double c = cost_o2o(pb.predictions[i], pb.labels[j], params);
      if (c < params.large_cost) {
        options[i].push_back({1u << j, c, true});
      }
    }
    const std::size_t k = pb.splits[i].segments.size();
    if (k == 0 || k > max_card) {
      continue;
    }
    for (unsigned set = 1; set < (1u << ng); ++set) {
      if (static_cast<std::size_t>(std::popcount(set)) != k) {
        continue;
      }
      std::vector<int> subset;
      for (std::size_t j = 0; j < ng; ++j) {
        if (set & (1u << j)) {
          subset.push_back(static_cast<int>(j));
        }
      }
      const double c = brute_o2m(pb.splits[i].segments, pb.labels, subset, params);
      if (c < params.large_cost) {
        options[i].push_back({set, c, false});
      }
    }
  }
  BruteResult out;
  const unsigned full = (1u << ng) - 1u;
  std::vector<double> partial(nq + 1, 0.0);
  auto rec = [&](auto && self, std::size_t i, unsigned covered, bool only_o2o) -> void {
    if (i == nq) {
      if (covered != full) {
        return;
      }
      if (!out.feasible || partial[i] < out.total) {
        out.feasible = true;
        out.total = partial[i];
      }
      if (only_o2o && (!out.o2o_only_feasible || partial[i] < out.best_o2o_only)) {
        out.o2o_only_feasible = true;
        out.best_o2o_only = partial[i];
      }
      return;
    }
    for (const Option & o : options[i]) {
      if (o.labels & covered) {
        continue;
      }
      partial[i + 1] = partial[i] + o.cost;
      self(self, i + 1, covered | o.labels, only_o2o && o.o2o);
    }
  };
  rec(rec, 0, 0u, true);
  return out;
}

/// Random small assignment instance: labels are random polylines (and
/// sometimes a crossing), predictions perturb them or are free, and the
/// mask carries up to `max_disks` random occluding disks.
struct AssignInstance
{
  std::vector<MapElement> predictions;
  std::vector<MapElement> labels;
  BevMask mask;
};

inline AssignInstance random_assign_instance(Rng & rng, int max_q, int max_g, int max_disks)
{
  const BevSpec spec{-10.0, 10.0, -10.0, 10.0, 5.0};
  AssignInstance inst;
  const int nq = uniform_int(rng, 1, max_q);
  const int ng = uniform_int(rng, 0, std::min(nq, max_g));
  auto random_element = [&]() {
    const int kind = uniform_int(rng, 0, 5);
    if (kind == 0) {
      const Point2 c{uniform(rng, -6.0, 6.0), uniform(rng, -6.0, 6.0)};
      const double hw = uniform(rng, 1.0, 3.0);
      const double hh = uniform(rng, 1.0, 2.0);
      return polygon({{c.x - hw, c.y - hh}, {c.x + hw, c.y - hh}, {c.x + hw, c.y + hh}, {c.x - hw, c.y + hh}});
    }
    const MapClass cls = kind <= 3 ? MapClass::kDivider : MapClass::kBoundary;
    return polyline(cls, random_polyline(rng, uniform_int(rng, 2, 4), 9.0, 2.0));
  };
  inst.mask = BevMask(spec, true);
  // Sometimes a label pair is the two visible ends of one occluded line and
  // the first prediction follows the whole line.
  const bool occluded_pair = ng >= 2 && uniform(rng, 0.0, 1.0) < 0.4;
  MapElement whole;
  if (occluded_pair) {
    const Point2 a{uniform(rng, -8.0, -4.0), uniform(rng, -8.0, 8.0)};
    const Point2 b{uniform(rng, 4.0, 8.0), uniform(rng, -8.0, 8.0)};
    const Point2 dir = (1.0 / distance(a, b)) * (b - a);
    const Point2 mid = 0.5 * (a + b);
    const double radius = uniform(rng, 1.0, 2.5);
    occlude_disk(inst.mask, mid, radius);
    const MapClass cls = uniform_int(rng, 0, 1) ? MapClass::kDivider : MapClass::kBoundary;
    inst.labels.push_back(polyline(cls, {a, mid - (radius + 0.3) * dir}));
    inst.labels.push_back(polyline(cls, {mid + (radius + 0.3) * dir, b}));
    whole = polyline(cls, {a, b});
  }
  while (static_cast<int>(inst.labels.size()) < ng) {
    inst.labels.push_back(random_element());
  }
  for (int i = 0; i < nq; ++i) {
    MapElement q;
    if (i == 0 && occluded_pair) {
      q = whole;
      for (Point2 & p : q.points) {
        p = p + Point2{uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)};
      }
    } else if (i < ng && uniform(rng, 0.0, 1.0) < 0.8) {
      q = inst.labels[static_cast<std::size_t>(uniform_int(rng, 0, ng - 1))];
      for (Point2 & p : q.points) {
        p.x = std::clamp(p.x + uniform(rng, -0.8, 0.8), -9.5, 9.5);
        p.y = std::clamp(p.y + uniform(rng, -0.8, 0.8), -9.5, 9.5);
      }
    } else {
      q = random_element();
    }
    q.confidence = uniform(rng, 0.05, 1.0);
    inst.predictions.push_back(std::move(q));
  }
  const int disks = uniform_int(rng, 0, max_disks);
  for (int d = 0; d < disks; ++d) {
    occlude_disk(inst.mask, {uniform(rng, -8.0, 8.0), uniform(rng, -8.0, 8.0)}, uniform(rng, 1.0, 4.0));
  }
  return inst;
}

/// A straight-road scene whose right boundary is cut by an occluding disk.
/// The labels are vectorized from the masked ground truth raster, so the
/// occluded boundary shows up as two fragments; the predictions are the
/// ground truth elements plus two distant distractors.
struct OccludedBoundaryFixture
{
  VectorMap gt;
  BevMask mask;
  std::vector<MapElement> predictions;
  std::vector<MapElement> labels;
  std::size_t occluded_prediction = 0;
};

inline OccludedBoundaryFixture occluded_boundary_fixture()
{
  SceneParams p;
  p.seed = 4;
  p.n_lanes = 2;
  p.n_crossings = 0;
  p.curvature = 0.0;
  OccludedBoundaryFixture fx;
  fx.gt = crop_to_range(gen_scene(p), p.spec);

  double best_x = -1e9;
  for (std::size_t k = 0; k < fx.gt.elements.size(); ++k) {
    const MapElement & e = fx.gt.elements[k];
    if (e.cls == MapClass::kBoundary && e.points.front().x > best_x) {
      best_x = e.points.front().x;
      fx.occluded_prediction = k;
    }
  }
  fx.mask = BevMask(p.spec, true);
  occlude_disk(fx.mask, {best_x, 0.0}, 2.0);

  SemanticRaster raster = rasterize_gt(fx.gt, p.spec, p.dash);
  for (int r = 0; r < raster.height; ++r) {
    for (int c = 0; c < raster.width; ++c) {
      if (!fx.mask.grid.at(r, c)) {
        raster.set(r, c, RasterClass::kUnobserved);
      }
    }
  }
  fx.labels = vectorize_bev(raster, VectorizeParams{}).map.elements;
  fx.predictions = fx.gt.elements;
  for (MapElement & q : fx.predictions) {
    q.confidence = 0.9;
  }
  fx.predictions.push_back(polyline(MapClass::kBoundary, {{-14.0, -28.0}, {-14.0, 28.0}}, 0.3));
  fx.predictions.push_back(polyline(MapClass::kDivider, {{-13.0, -28.0}, {-13.0, 28.0}}, 0.2));
  return fx;
}

}  // namespace pseudomap::test

#endif  // PSEUDOMAP__TESTS__ASSIGN_ORACLE_HPP_
