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

#include <algorithm>
#include <limits>

#include "pseudomap/simd/kernels.hpp"

namespace pseudomap::simd
{
namespace
{

double nearest_dist_sq_scalar(double qx, double qy, const double * xs, const double * ys, std::size_t n)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double d2 = dx * dx + dy * dy;
    best = d2 < best ? d2 : best;
  }
  return best;
}

void segment_update_scalar(
  const double * px, double py, std::size_t n, const Segment & seg, std::int32_t seg_index,
  double * best_d2, std::int32_t * best_seg, double * best_t)
{
  const double dy = py - seg.ay;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = px[i] - seg.ax;
    double t = (dx * seg.ex + dy * seg.ey) * seg.inv_len2;
    t = t < 1.0 ? t : 1.0;
    t = t > 0.0 ? t : 0.0;
    const double cx = dx - t * seg.ex;
    const double cy = dy - t * seg.ey;
    const double d2 = cx * cx + cy * cy;
    if (d2 < best_d2[i]) {
      best_d2[i] = d2;
      best_seg[i] = seg_index;
      best_t[i] = t;
    }
  }
}

void or_into_scalar(std::uint8_t * dst, const std::uint8_t * src, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] |= src[i];
  }
}

void and_into_scalar(std::uint8_t * dst, const std::uint8_t * src, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] &= src[i];
  }
}

MaskedSums masked_sums_scalar(const double * p, const double * t, const std::uint8_t * m, std::size_t n)
{
  double pt[4] = {0.0, 0.0, 0.0, 0.0};
  double pp[4] = {0.0, 0.0, 0.0, 0.0};
  double tt[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lane = i & 3u;
    const double w = static_cast<double>(m[i]);
    pt[lane] += (p[i] * t[i]) * w;
    pp[lane] += (p[i] * p[i]) * w;
    tt[lane] += (t[i] * t[i]) * w;
  }
  return {(pt[0] + pt[1]) + (pt[2] + pt[3]), (pp[0] + pp[1]) + (pp[2] + pp[3]),
          (tt[0] + tt[1]) + (tt[2] + tt[3])};
}

}  // namespace

namespace detail
{
const Kernels & scalar_kernels()
{
  static const Kernels table{
    Isa::kScalar,    nearest_dist_sq_scalar, segment_update_scalar, or_into_scalar, and_into_scalar,
    masked_sums_scalar,
  };
  return table;
}
}  // namespace detail

}  // namespace pseudomap::simd
