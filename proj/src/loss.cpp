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

#include "pseudomap/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pseudomap/error.hpp"
#include "pseudomap/simd/kernels.hpp"

namespace pseudomap
{

SoftRaster::SoftRaster(const BevSpec & s, double fill)
: spec(s), width(s.width()), height(s.height()),
  values(static_cast<std::size_t>(s.width()) * static_cast<std::size_t>(s.height()), fill)
{
}

void SoftRasterParams::validate() const
{
  require(sigma > 0.0, "sigma must be positive");
  require(band_width >= 0.0, "band width must be non-negative");
}

namespace
{

std::vector<simd::Segment> element_segments(const MapElement & e)
{
  std::vector<simd::Segment> segs;
  const std::size_t n = e.points.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    segs.push_back(simd::make_segment(e.points[i].x, e.points[i].y, e.points[i + 1].x, e.points[i + 1].y));
  }
  if (e.closed() && n >= 3) {
    segs.push_back(simd::make_segment(e.points[n - 1].x, e.points[n - 1].y, e.points[0].x, e.points[0].y));
  }
  return segs;
}

std::pair<std::size_t, std::size_t> segment_ends(const MapElement & e, std::int32_t s)
{
  const std::size_t a = static_cast<std::size_t>(s);
  return {a, (a + 1) % e.points.size()};
}

}  // namespace

SoftRasterization soft_rasterize(const MapElement & element, const BevSpec & spec, const SoftRasterParams & params)
{
  params.validate();
  require(element.points.size() >= 2, "soft_rasterize needs at least 2 points");
  SoftRasterization out;
  out.raster = SoftRaster(spec);
  const int w = out.raster.width;
  const int h = out.raster.height;
  const std::size_t total = out.raster.values.size();
  out.segment.assign(total, 0);
  out.t.assign(total, 0.0);
  out.dist.assign(total, 0.0);
  const std::vector<simd::Segment> segs = element_segments(element);
  const auto & k = simd::kernels();
  std::vector<double> xs(w);
  for (int c = 0; c < w; ++c) {
    xs[c] = spec.pixel_center(0, c).x;
  }
  std::vector<double> d2(w);
  const double half_band = element.closed() ? 0.5 * params.band_width : 0.0;
  const double inv_two_s2 = 1.0 / (2.0 * params.sigma * params.sigma);
  for (int r = 0; r < h; ++r) {
    const double y = spec.pixel_center(r, 0).y;
    const std::size_t row = static_cast<std::size_t>(r) * w;
    std::fill(d2.begin(), d2.end(), std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      k.segment_update(xs.data(), y, w, segs[s], static_cast<std::int32_t>(s), d2.data(), out.segment.data() + row,
        out.t.data() + row);
    }
    for (int c = 0; c < w; ++c) {
      const double d = std::sqrt(d2[c]);
      const double dd = std::max(0.0, d - half_band);
      out.dist[row + c] = d;
      out.raster.values[row + c] = std::exp(-dd * dd * inv_two_s2);
    }
  }
  return out;
}

std::vector<Point2> soft_raster_backprop(
  const SoftRasterization & sr, const MapElement & element, const SoftRasterParams & params,
  std::span<const double> dl_dvalue)
{
  require(dl_dvalue.size() == sr.raster.values.size(), "gradient size does not match the raster");
  std::vector<Point2> grad(element.points.size());
  const double half_band = element.closed() ? 0.5 * params.band_width : 0.0;
  const double inv_s2 = 1.0 / (params.sigma * params.sigma);
  const BevSpec & spec = sr.raster.spec;
  for (int r = 0; r < sr.raster.height; ++r) {
    for (int c = 0; c < sr.raster.width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * sr.raster.width + c;
      const double g = dl_dvalue[i];
      if (g == 0.0) {
        continue;
      }
      const double d = sr.dist[i];
      const double dd = d - half_band;
      if (dd <= 0.0) {
        continue;
      }
      // dv/dd = -v dd / s^2; dd/da = -(1 - t)(p - c) / d.
      const double factor = g * sr.raster.values[i] * inv_s2 * (half_band > 0.0 ? dd / d : 1.0);
      const auto [ia, ib] = segment_ends(element, sr.segment[i]);
      const Point2 a = element.points[ia];
      const Point2 b = element.points[ib];
      const double t = sr.t[i];
      const Point2 p = spec.pixel_center(r, c);
      const Point2 diff = p - (a + t * (b - a));
      grad[ia] = grad[ia] + (factor * (1.0 - t)) * diff;
      grad[ib] = grad[ib] + (factor * t) * diff;
    }
  }
  return grad;
}

ScalarGrad focal_loss(std::span<const double> p_hat, int cls, double alpha, double gamma)
{
  require(cls >= 0 && static_cast<std::size_t>(cls) < p_hat.size(), "focal class index out of range");
  require(alpha >= 0.0 && gamma >= 0.0, "focal alpha and gamma must be non-negative");
  ScalarGrad out;
  out.grad.assign(p_hat.size(), 0.0);
  const double raw = p_hat[cls];
  const double p = std::max(raw, kFocalEps);
  const double q = 1.0 - p;
  const double lg = std::log(p);
  out.value = -alpha * std::pow(q, gamma) * lg;
  if (raw >= kFocalEps) {
    const double dq = gamma == 0.0 ? 0.0 : gamma * std::pow(q, gamma - 1.0);
    out.grad[cls] = alpha * dq * lg - alpha * std::pow(q, gamma) / p;
  }
  return out;
}

ScalarGrad dice_loss(const SoftRaster & pred, const SoftRaster & target, const BevMask & mask)
{
  require(pred.width == target.width && pred.height == target.height, "dice rasters differ in size");
  require(pred.width == mask.width() && pred.height == mask.height(), "dice mask differs in size");
  const std::size_t n = pred.values.size();
  // Sum over the observed cells in scan order so the result depends only on
  // their sequence, not on where the masked cells sit.
  std::vector<double> op;
  std::vector<double> ot;
  op.reserve(n);
  ot.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.grid.bits[i]) {
      op.push_back(pred.values[i]);
      ot.push_back(target.values[i]);
    }
  }
  const std::vector<std::uint8_t> ones(op.size(), 1);
  const simd::MaskedSums s = simd::kernels().masked_sums(op.data(), ot.data(), ones.data(), op.size());
  const double num = 2.0 * s.pt + kDiceEps;
  const double den = s.pp + s.tt + kDiceEps;
  ScalarGrad out;
  out.value = 1.0 - num / den;
  out.grad.assign(n, 0.0);
  const double inv_den2 = 1.0 / (den * den);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.grid.bits[i]) {
      out.grad[i] = -(2.0 * target.values[i] * den - num * 2.0 * pred.values[i]) * inv_den2;
    }
  }
  return out;
}

L1Result pointwise_l1(const MapElement & q, const MapElement & g)
{
  require(q.points.size() == g.points.size(), "pointwise_l1 needs equal point counts");
  L1Result best;
  best.value = std::numeric_limits<double>::infinity();
  const auto orderings = equivalent_orderings(g);
  for (std::size_t o = 0; o < orderings.size(); ++o) {
    double sum = 0.0;
    for (std::size_t l = 0; l < q.points.size(); ++l) {
      sum += std::abs(q.points[l].x - orderings[o][l].x) + std::abs(q.points[l].y - orderings[o][l].y);
    }
    if (sum < best.value) {
      best.value = sum;
      best.ordering = o;
    }
  }
  const auto & gp = orderings[best.ordering];
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  best.grad.resize(q.points.size());
  for (std::size_t l = 0; l < q.points.size(); ++l) {
    best.grad[l] = {sign(q.points[l].x - gp[l].x), sign(q.points[l].y - gp[l].y)};
  }
  return best;
}

PointGrad render_loss(
  const MapElement & q, const std::vector<MapElement> & assigned, const BevMask & mask, const SoftRasterParams & params)
{
  require(!assigned.empty(), "render_loss needs at least one assigned label");
  SoftRaster target(mask.spec, 0.0);
  for (const MapElement & g : assigned) {
    const SoftRasterization sg = soft_rasterize(g, mask.spec, params);
    for (std::size_t i = 0; i < target.values.size(); ++i) {
      target.values[i] = std::max(target.values[i], sg.raster.values[i]);
    }
  }
  const SoftRasterization sq = soft_rasterize(q, mask.spec, params);
  const ScalarGrad dice = dice_loss(sq.raster, target, mask);
  return {dice.value, soft_raster_backprop(sq, q, params, dice.grad)};
}

PointGrad direction_loss(const MapElement & q)
{
  const std::size_t n = q.points.size();
  require(n >= 3, "direction_loss needs at least 3 points");
  PointGrad out;
  out.grad.assign(n, {0.0, 0.0});
  const bool ring = q.closed();
  const std::size_t first = ring ? 0 : 1;
  const std::size_t last = ring ? n : n - 1;  // exclusive
  const std::size_t count = last - first;
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const std::size_t prev = (k + n - 1) % n;
    const std::size_t next = (k + 1) % n;
    const Point2 e1 = q.points[k] - q.points[prev];
    const Point2 e2 = q.points[next] - q.points[k];
    const double n1 = norm(e1);
    const double n2 = norm(e2);
    if (n1 == 0.0 || n2 == 0.0) {
      continue;
    }
    const double cosv = dot(e1, e2) / (n1 * n2);
    sum += 1.0 - cosv;
    // d(1 - cos)/de1 and d(1 - cos)/de2
    const Point2 g1 = (cosv / (n1 * n1)) * e1 - (1.0 / (n1 * n2)) * e2;
    const Point2 g2 = (cosv / (n2 * n2)) * e2 - (1.0 / (n1 * n2)) * e1;
    const double inv = 1.0 / static_cast<double>(count);
    out.grad[prev] = out.grad[prev] - inv * g1;
    out.grad[k] = out.grad[k] + inv * (g1 - g2);
    out.grad[next] = out.grad[next] + inv * g2;
  }
  out.value = sum / static_cast<double>(count);
  return out;
}

double masked_bev_seg_loss(const SoftRaster & pred, const BinaryGrid & label, const BevMask & mask)
{
  require(pred.width == label.width && pred.height == label.height, "label grid differs in size");
  require(pred.width == mask.width() && pred.height == mask.height(), "mask differs in size");
  double bce = 0.0;
  double pt = 0.0;
  double pp = 0.0;
  double tt = 0.0;
  std::size_t observed = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    if (!mask.grid.bits[i]) {
      continue;
    }
    ++observed;
    const double p = std::clamp(pred.values[i], kFocalEps, 1.0 - kFocalEps);
    const double y = label.bits[i] ? 1.0 : 0.0;
    bce -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    pt += pred.values[i] * y;
    pp += pred.values[i] * pred.values[i];
    tt += y * y;
  }
  if (observed == 0) {
    return 0.0;
  }
  return bce / static_cast<double>(observed) + (1.0 - (2.0 * pt + kDiceEps) / (pp + tt + kDiceEps));
}

BinaryGrid maxpool_downsample(const BinaryGrid & grid, int factor)
{
  require(factor >= 1, "pool factor must be at least 1");
  require(grid.width % factor == 0 && grid.height % factor == 0, "grid dimensions must be divisible by the pool factor");
  BinaryGrid out(grid.width / factor, grid.height / factor, 0);
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (grid.at(r, c)) {
        out.at(r / factor, c / factor) = 1;
      }
    }
  }
  return out;
}

double LossWeights::operator[](LossTerm t) const
{
  switch (t) {
    case LossTerm::kCls:
      return cls;
    case LossTerm::kPt:
      return pt;
    case LossTerm::kRend:
      return rend;
    case LossTerm::kDir:
      return dir;
    case LossTerm::kBevSeg:
      return bev_seg;
  }
  return 0.0;
}

void LossWeights::validate() const
{
  for (double w : {cls, pt, rend, dir, bev_seg}) {
    require(std::isfinite(w) && w >= 0.0, "loss weights must be finite and non-negative");
  }
}

std::string_view to_string(LossTerm t)
{
  switch (t) {
    case LossTerm::kCls:
      return "cls";
    case LossTerm::kPt:
      return "pt";
    case LossTerm::kRend:
      return "rend";
    case LossTerm::kDir:
      return "dir";
    case LossTerm::kBevSeg:
      return "bev_seg";
  }
  return "?";
}

LossBreakdown total_loss(const std::array<LossPart, kNumLossTerms> & parts, const LossWeights & weights)
{
  weights.validate();
  LossBreakdown out;
  std::size_t n_pred = 0;
  for (const LossPart & p : parts) {
    n_pred = std::max({n_pred, p.grad_points.size(), p.grad_class.size()});
  }
  out.grad_points.resize(n_pred);
  out.grad_class.resize(n_pred);
  for (int k = 0; k < kNumLossTerms; ++k) {
    const LossPart & part = parts[k];
    const double w = weights[static_cast<LossTerm>(k)];
    out.terms[k] = part.value;
    out.total += w * part.value;
    for (std::size_t i = 0; i < part.grad_points.size(); ++i) {
      auto & dst = out.grad_points[i];
      if (dst.size() < part.grad_points[i].size()) {
        dst.resize(part.grad_points[i].size());
      }
      for (std::size_t l = 0; l < part.grad_points[i].size(); ++l) {
        dst[l] = dst[l] + w * part.grad_points[i][l];
      }
    }
    for (std::size_t i = 0; i < part.grad_class.size(); ++i) {
      auto & dst = out.grad_class[i];
      if (dst.size() < part.grad_class[i].size()) {
        dst.resize(part.grad_class[i].size(), 0.0);
      }
      for (std::size_t l = 0; l < part.grad_class[i].size(); ++l) {
        dst[l] += w * part.grad_class[i][l];
      }
    }
  }
  return out;
}

}  // namespace pseudomap
