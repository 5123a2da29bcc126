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

#ifndef PSEUDOMAP__LOSS_HPP_
#define PSEUDOMAP__LOSS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap
{

struct SoftRaster
{
  BevSpec spec;
  int width = 0;
  int height = 0;
  std::vector<double> values;

  SoftRaster() = default;
  explicit SoftRaster(const BevSpec & s, double fill = 0.0);
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * width + c]; }
};

struct SoftRasterParams
{
  double sigma = 0.3;        // meters
  double band_width = 0.05;  // meters, polygons only

  void validate() const;
  friend bool operator==(const SoftRasterParams &, const SoftRasterParams &) = default;
};

/// Soft raster plus the closest segment of every pixel, which is all the
/// Jacobian needs.
struct SoftRasterization
{
  SoftRaster raster;
  std::vector<std::int32_t> segment;  // index of the closest segment
  std::vector<double> t;              // clamped projection parameter
  std::vector<double> dist;           // unclipped distance to the element
};

/// value = exp(-d^2 / (2 sigma^2)); d is the distance to the polyline, or
/// for polygons the distance to the ring minus half the band width
/// (clamped at 0).
SoftRasterization soft_rasterize(const MapElement & element, const BevSpec & spec, const SoftRasterParams & params);

/// Pulls per-pixel gradients dL/dvalue back to the element's points.
std::vector<Point2> soft_raster_backprop(
  const SoftRasterization & sr, const MapElement & element, const SoftRasterParams & params,
  std::span<const double> dl_dvalue);

struct ScalarGrad
{
  double value = 0.0;
  std::vector<double> grad;
};

struct PointGrad
{
  double value = 0.0;
  std::vector<Point2> grad;
};

inline constexpr double kFocalEps = 1e-7;
inline constexpr double kDiceEps = 1.0;

/// -alpha (1 - p_t)^gamma log p_t with p_t = p_hat[cls] clamped at 1e-7.
/// grad is with respect to p_hat.
ScalarGrad focal_loss(std::span<const double> p_hat, int cls, double alpha, double gamma);

/// 1 - (2 sum m p t + 1) / (sum m p^2 + sum m t^2 + 1) over observed cells;
/// grad is with respect to pred.
ScalarGrad dice_loss(const SoftRaster & pred, const SoftRaster & target, const BevMask & mask);

struct L1Result
{
  double value = 0.0;
  std::vector<Point2> grad;  // with respect to q
  std::size_t ordering = 0;  // index into equivalent_orderings(g)
};

/// Minimum over the equivalent orderings of g of sum_l |q_l - g_l|_1.
L1Result pointwise_l1(const MapElement & q, const MapElement & g);

/// Pixel-wise max of the label rasters as target, Dice against q's raster.
PointGrad render_loss(
  const MapElement & q, const std::vector<MapElement> & assigned, const BevMask & mask,
  const SoftRasterParams & params);

/// Mean of (1 - cos turn) over interior vertices (every vertex for
/// polygons). Zero-length edges contribute 0.
PointGrad direction_loss(const MapElement & q);

/// Masked binary cross-entropy (mean over observed cells) plus masked Dice.
double masked_bev_seg_loss(const SoftRaster & pred, const BinaryGrid & label, const BevMask & mask);

/// Block-wise OR.
BinaryGrid maxpool_downsample(const BinaryGrid & grid, int factor);

enum class LossTerm
{
  kCls = 0,
  kPt,
  kRend,
  kDir,
  kBevSeg,
};
inline constexpr int kNumLossTerms = 5;

struct LossWeights
{
  double cls = 2.0;
  double pt = 5.0;
  double rend = 1.0;
  double dir = 0.1;
  double bev_seg = 1.0;

  double operator[](LossTerm t) const;
  void validate() const;
  friend bool operator==(const LossWeights &, const LossWeights &) = default;
};

/// One term with gradients shaped like the predictions.
struct LossPart
{
  double value = 0.0;
  std::vector<std::vector<Point2>> grad_points;
  std::vector<std::vector<double>> grad_class;
};

struct LossBreakdown
{
  std::array<double, kNumLossTerms> terms{};
  double total = 0.0;
  std::vector<std::vector<Point2>> grad_points;
  std::vector<std::vector<double>> grad_class;

  double cls() const { return terms[0]; }
  double pt() const { return terms[1]; }
  double rend() const { return terms[2]; }
  double dir() const { return terms[3]; }
  double bev_seg() const { return terms[4]; }
};

/// total = sum_k w_k term_k, summed in term order; gradients likewise.
LossBreakdown total_loss(const std::array<LossPart, kNumLossTerms> & parts, const LossWeights & weights);

std::string_view to_string(LossTerm t);

}  // namespace pseudomap

#endif  // PSEUDOMAP__LOSS_HPP_
