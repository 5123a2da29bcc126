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

#include "pseudomap/surfel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pseudomap/error.hpp"

namespace pseudomap
{

void Surfel::validate() const
{
  require(scale[0] > 0.0 && scale[1] > 0.0, "surfel scale must be positive");
  require(opacity >= 0.0 && opacity <= 1.0, "surfel opacity must lie in [0, 1]");
  double sum = 0.0;
  for (double p : class_probs) {
    require(p >= 0.0, "surfel class probabilities must be non-negative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-6, "surfel class probabilities must sum to 1");
  const double qn = std::hypot(std::hypot(rotation[0], rotation[1]), std::hypot(rotation[2], rotation[3]));
  require(std::abs(qn - 1.0) <= 1e-6, "surfel rotation must be a unit quaternion");
}

void Trajectory::validate() const
{
  require(!poses.empty(), "trajectory must not be empty");
  require(timestamps.empty() || timestamps.size() == poses.size(), "trajectory needs one timestamp per pose");
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    require(timestamps[i] > timestamps[i - 1], "trajectory timestamps must be strictly increasing");
  }
}

void SurfelGrid::validate() const
{
  require(spacing > 0.0, "surfel spacing must be positive");
  require(!surfels.empty(), "surfel grid must not be empty");
  for (const Surfel & s : surfels) {
    s.validate();
  }
}

SurfelGrid init_meshgrid(const Trajectory & traj, double offset_r, double spacing)
{
  traj.validate();
  require(offset_r > 0.0, "offset_r must be positive");
  require(spacing > 0.0, "spacing must be positive");
  constexpr double kTol = 1e-9;
  std::set<std::pair<long, long>> cells;  // (y index, x index)
  for (const Pose2 & p : traj.poses) {
    const long x0 = static_cast<long>(std::ceil((p.x - offset_r) / spacing - kTol));
    const long x1 = static_cast<long>(std::floor((p.x + offset_r) / spacing + kTol));
    const long y0 = static_cast<long>(std::ceil((p.y - offset_r) / spacing - kTol));
    const long y1 = static_cast<long>(std::floor((p.y + offset_r) / spacing + kTol));
    for (long iy = y0; iy <= y1; ++iy) {
      for (long ix = x0; ix <= x1; ++ix) {
        cells.insert({iy, ix});
      }
    }
  }
  SurfelGrid grid;
  grid.spacing = spacing;
  grid.source_trajectory = traj.poses;
  grid.surfels.reserve(cells.size());
  for (const auto & [iy, ix] : cells) {
    Surfel s;
    s.center = {static_cast<double>(ix) * spacing, static_cast<double>(iy) * spacing, 0.0};
    s.scale = {0.5 * spacing, 0.5 * spacing};
    grid.surfels.push_back(s);
  }
  return grid;
}

void RenderParams::validate() const
{
  require(alpha_min >= 0.0 && alpha_min <= 1.0, "alpha_min must lie in [0, 1]");
  require(cutoff_sigma > 0.0, "cutoff_sigma must be positive");
}

namespace
{

// First two columns of the rotation matrix of a unit quaternion.
void surfel_axes(const std::array<double, 4> & q, Point2 & u, Point2 & v)
{
  const double w = q[0];
  const double x = q[1];
  const double y = q[2];
  const double z = q[3];
  u = {1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y + w * z)};
  v = {2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z)};
}

Point2 rotate(Point2 p, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

}  // namespace

BevRender render_bev(const SurfelGrid & grid, const Pose2 & pose, const BevSpec & spec, const RenderParams & params)
{
  grid.validate();
  spec.validate();
  params.validate();
  BevRender out;
  out.raster = SemanticRaster(spec, RasterClass::kUnobserved);
  const int w = out.raster.width;
  const int h = out.raster.height;
  const std::size_t n_px = static_cast<std::size_t>(w) * h;
  std::vector<double> transmit(n_px, 1.0);
  std::vector<double> wsum(n_px, 0.0);
  std::vector<std::array<double, kNumSurfelClasses>> cls(n_px, std::array<double, kNumSurfelClasses>{});
  std::vector<std::array<double, 3>> col(n_px, std::array<double, 3>{});

  // Front to back: descending height, then grid order.
  std::vector<std::size_t> order(grid.surfels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
    [&](std::size_t a, std::size_t b) { return grid.surfels[a].center[2] > grid.surfels[b].center[2]; });

  const double cut2 = params.cutoff_sigma * params.cutoff_sigma;
  for (std::size_t idx : order) {
    const Surfel & s = grid.surfels[idx];
    if (s.opacity <= 0.0) {
      continue;
    }
    const Point2 c = pose.to_local({s.center[0], s.center[1]});
    Point2 u;
    Point2 v;
    surfel_axes(s.rotation, u, v);
    u = rotate(u, -pose.heading);
    v = rotate(v, -pose.heading);
    const double det = u.x * v.y - u.y * v.x;
    if (std::abs(det) < 1e-12) {
      continue;  // seen edge-on
    }
    const double reach = params.cutoff_sigma * (s.scale[0] + s.scale[1]);
    const int r0 = std::max(0, spec.row_of(c.y + reach));
    const int r1 = std::min(h - 1, spec.row_of(c.y - reach));
    const int c0 = std::max(0, spec.col_of(c.x - reach));
    const int c1 = std::min(w - 1, spec.col_of(c.x + reach));
    for (int r = r0; r <= r1; ++r) {
      for (int cc = c0; cc <= c1; ++cc) {
        const Point2 d = spec.pixel_center(r, cc) - c;
        // Solve a u + b v = d for the surfel-local coordinates.
        const double a = (d.x * v.y - d.y * v.x) / det;
        const double b = (u.x * d.y - u.y * d.x) / det;
        const double q = (a * a) / (s.scale[0] * s.scale[0]) + (b * b) / (s.scale[1] * s.scale[1]);
        if (q > cut2) {
          continue;
        }
        const double wt = s.opacity * std::exp(-0.5 * q);
        const std::size_t i = static_cast<std::size_t>(r) * w + cc;
        transmit[i] *= 1.0 - wt;
        wsum[i] += wt;
        for (int k = 0; k < kNumSurfelClasses; ++k) {
          cls[i][k] += wt * s.class_probs[k];
        }
        for (int k = 0; k < 3; ++k) {
          col[i][k] += wt * s.color[k];
        }
      }
    }
  }

  out.alpha.resize(n_px);
  out.color.assign(n_px, std::array<double, 3>{});
  for (std::size_t i = 0; i < n_px; ++i) {
    out.alpha[i] = 1.0 - transmit[i];
    if (wsum[i] > 0.0) {
      for (int k = 0; k < 3; ++k) {
        out.color[i][k] = col[i][k] / wsum[i];
      }
    }
    if (out.alpha[i] < params.alpha_min) {
      continue;
    }
    int best = 0;
    for (int k = 1; k < kNumSurfelClasses; ++k) {
      if (cls[i][k] > cls[i][best]) {
        best = k;
      }
    }
    out.raster.classes[i] = static_cast<std::uint8_t>(best + 1);
  }
  return out;
}

SurfelGrid transform_grid(const SurfelGrid & grid, const Pose2 & t)
{
  SurfelGrid out = grid;
  const double ch = std::cos(0.5 * t.heading);
  const double sh = std::sin(0.5 * t.heading);
  for (Surfel & s : out.surfels) {
    const Point2 p = t.to_world({s.center[0], s.center[1]});
    s.center[0] = p.x;
    s.center[1] = p.y;
    // Yaw quaternion (ch, 0, 0, sh) times s.rotation.
    const auto & q = s.rotation;
    s.rotation = {ch * q[0] - sh * q[3], ch * q[1] - sh * q[2], ch * q[2] + sh * q[1], ch * q[3] + sh * q[0]};
  }
  for (Pose2 & p : out.source_trajectory) {
    p = t.compose(p);
  }
  return out;
}

void paint_surfels(SurfelGrid & grid, const SemanticRaster & raster, const Pose2 & pose)
{
  const BevSpec & spec = raster.spec;
  for (Surfel & s : grid.surfels) {
    const Point2 p = pose.to_local({s.center[0], s.center[1]});
    const int r = spec.row_of(p.y);
    const int c = spec.col_of(p.x);
    const RasterClass cls = raster.in_bounds(r, c) ? raster.at(r, c) : RasterClass::kUnobserved;
    if (cls == RasterClass::kUnobserved) {
      s.opacity = 0.0;
      continue;
    }
    s.class_probs.fill(0.0);
    s.class_probs[static_cast<int>(cls) - 1] = 1.0;
    s.opacity = 1.0;
  }
}

}  // namespace pseudomap
