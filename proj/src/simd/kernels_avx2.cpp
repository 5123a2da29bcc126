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

#include <immintrin.h>

#include <limits>

#include "pseudomap/simd/kernels.hpp"

namespace pseudomap::simd
{
namespace
{

// Four doubles per lane group. The scalar tail reproduces the lane
// assignment of kernels_scalar.cpp exactly.

double nearest_dist_sq_avx2(double qx, double qy, const double * xs, const double * ys, std::size_t n)
{
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    vbest = _mm256_min_pd(d2, vbest);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vbest);
  double best = lanes[0];
  for (int k = 1; k < 4; ++k) {
    best = lanes[k] < best ? lanes[k] : best;
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double d2 = dx * dx + dy * dy;
    best = d2 < best ? d2 : best;
  }
  return best;
}

void segment_update_avx2(
  const double * px, double py, std::size_t n, const Segment & seg, std::int32_t seg_index,
  double * best_d2, std::int32_t * best_seg, double * best_t)
{
  const double dy_s = py - seg.ay;
  const __m256d ax = _mm256_set1_pd(seg.ax);
  const __m256d ex = _mm256_set1_pd(seg.ex);
  const __m256d ey = _mm256_set1_pd(seg.ey);
  const __m256d inv = _mm256_set1_pd(seg.inv_len2);
  const __m256d dy = _mm256_set1_pd(dy_s);
  const __m256d dy_ey = _mm256_mul_pd(dy, ey);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(px + i), ax);
    __m256d t = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(dx, ex), dy_ey), inv);
    t = _mm256_min_pd(t, one);
    t = _mm256_max_pd(t, zero);
    const __m256d cx = _mm256_sub_pd(dx, _mm256_mul_pd(t, ex));
    const __m256d cy = _mm256_sub_pd(dy, _mm256_mul_pd(t, ey));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(cx, cx), _mm256_mul_pd(cy, cy));
    const __m256d old = _mm256_loadu_pd(best_d2 + i);
    const __m256d better = _mm256_cmp_pd(d2, old, _CMP_LT_OQ);
    const int bits = _mm256_movemask_pd(better);
    if (bits == 0) {
      continue;
    }
    _mm256_storeu_pd(best_d2 + i, _mm256_blendv_pd(old, d2, better));
    _mm256_storeu_pd(best_t + i, _mm256_blendv_pd(_mm256_loadu_pd(best_t + i), t, better));
    for (int k = 0; k < 4; ++k) {
      if (bits & (1 << k)) {
        best_seg[i + k] = seg_index;
      }
    }
  }
  for (; i < n; ++i) {
    const double dxs = px[i] - seg.ax;
    double t = (dxs * seg.ex + dy_s * seg.ey) * seg.inv_len2;
    t = t < 1.0 ? t : 1.0;
    t = t > 0.0 ? t : 0.0;
    const double cx = dxs - t * seg.ex;
    const double cy = dy_s - t * seg.ey;
    const double d2 = cx * cx + cy * cy;
    if (d2 < best_d2[i]) {
      best_d2[i] = d2;
      best_seg[i] = seg_index;
      best_t[i] = t;
    }
  }
}

void or_into_avx2(std::uint8_t * dst, const std::uint8_t * src, std::size_t n)
{
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(dst + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i), _mm256_or_si256(a, b));
  }
  for (; i < n; ++i) {
    dst[i] |= src[i];
  }
}

void and_into_avx2(std::uint8_t * dst, const std::uint8_t * src, std::size_t n)
{
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(dst + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i), _mm256_and_si256(a, b));
  }
  for (; i < n; ++i) {
    dst[i] &= src[i];
  }
}

inline __m256d load_mask4(const std::uint8_t * m)
{
  return _mm256_set_pd(
    static_cast<double>(m[3]), static_cast<double>(m[2]), static_cast<double>(m[1]),
    static_cast<double>(m[0]));
}

MaskedSums masked_sums_avx2(const double * p, const double * t, const std::uint8_t * m, std::size_t n)
{
  __m256d vpt = _mm256_setzero_pd();
  __m256d vpp = _mm256_setzero_pd();
  __m256d vtt = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vp = _mm256_loadu_pd(p + i);
    const __m256d vt = _mm256_loadu_pd(t + i);
    const __m256d w = load_mask4(m + i);
    vpt = _mm256_add_pd(vpt, _mm256_mul_pd(_mm256_mul_pd(vp, vt), w));
    vpp = _mm256_add_pd(vpp, _mm256_mul_pd(_mm256_mul_pd(vp, vp), w));
    vtt = _mm256_add_pd(vtt, _mm256_mul_pd(_mm256_mul_pd(vt, vt), w));
  }
  alignas(32) double pt[4];
  alignas(32) double pp[4];
  alignas(32) double tt[4];
  _mm256_store_pd(pt, vpt);
  _mm256_store_pd(pp, vpp);
  _mm256_store_pd(tt, vtt);
  for (; i < n; ++i) {
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
const Kernels & avx2_kernels()
{
  static const Kernels table{
    Isa::kAvx2, nearest_dist_sq_avx2, segment_update_avx2, or_into_avx2, and_into_avx2, masked_sums_avx2,
  };
  return table;
}
}  // namespace detail

}  // namespace pseudomap::simd
