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

#ifndef PSEUDOMAP__SIMD__KERNELS_HPP_
#define PSEUDOMAP__SIMD__KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace pseudomap::simd
{

// Data-parallel inner loops. Every ISA variant performs the same IEEE
// operations in the same order per element (reductions use four fixed
// interleaved accumulators), so the variants agree bit for bit.

enum class Isa
{
  kScalar,
  kAvx2,
};

std::string_view to_string(Isa isa);

/// Segment a + t e, t in [0, 1]. inv_len2 = 1 / |e|^2, or 0 for a point.
struct Segment
{
  double ax;
  double ay;
  double ex;
  double ey;
  double inv_len2;
};

Segment make_segment(double ax, double ay, double bx, double by);

struct MaskedSums
{
  double pt = 0.0;  // sum m p t
  double pp = 0.0;  // sum m p^2
  double tt = 0.0;  // sum m t^2
};

struct Kernels
{
  Isa isa;

  /// min_i (xs[i] - qx)^2 + (ys[i] - qy)^2, +inf for n == 0.
  double (*nearest_dist_sq)(double qx, double qy, const double * xs, const double * ys, std::size_t n);

  /// For pixels (px[i], py): if the squared distance to `seg` is strictly
  /// below best_d2[i], store it together with seg_index and the clamped
  /// projection parameter.
  void (*segment_update)(
    const double * px, double py, std::size_t n, const Segment & seg, std::int32_t seg_index,
    double * best_d2, std::int32_t * best_seg, double * best_t);

  /// dst[i] |= src[i]
  void (*or_into)(std::uint8_t * dst, const std::uint8_t * src, std::size_t n);
  /// dst[i] &= src[i]
  void (*and_into)(std::uint8_t * dst, const std::uint8_t * src, std::size_t n);

  /// m[i] is 0 or 1.
  MaskedSums (*masked_sums)(const double * p, const double * t, const std::uint8_t * m, std::size_t n);
};

bool isa_supported(Isa isa);

/// Table for a specific ISA; nullptr when the CPU or build lacks it.
const Kernels * kernels_for(Isa isa);

/// Best supported table, chosen once. PSEUDOMAP_SIMD=scalar forces the
/// scalar reference.
const Kernels & kernels();

namespace detail
{
const Kernels & scalar_kernels();
#if defined(PSEUDOMAP_HAVE_AVX2)
const Kernels & avx2_kernels();
#endif
}  // namespace detail

}  // namespace pseudomap::simd

#endif  // PSEUDOMAP__SIMD__KERNELS_HPP_
