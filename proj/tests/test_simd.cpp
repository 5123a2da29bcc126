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

#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "pseudomap/simd/kernels.hpp"
#include "support.hpp"

namespace pseudomap
{
namespace
{

using simd::Isa;
using simd::Kernels;
using test::Rng;

bool same_bits(double a, double b)
{
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::vector<double> random_values(Rng & rng, std::size_t n, double lo, double hi)
{
  std::vector<double> v(n);
  for (double & x : v) {
    x = test::uniform(rng, lo, hi);
  }
  return v;
}

std::vector<std::uint8_t> random_bits(Rng & rng, std::size_t n)
{
  std::vector<std::uint8_t> v(n);
  for (auto & b : v) {
    b = test::uniform(rng, 0, 1) < 0.5;
  }
  return v;
}

// Distance from (px, py) to a segment, written from scratch.
double seg_d2_oracle(double px, double py, double ax, double ay, double bx, double by)
{
  const double ex = bx - ax;
  const double ey = by - ay;
  const double l2 = ex * ex + ey * ey;
  double t = l2 > 0.0 ? ((px - ax) * ex + (py - ay) * ey) / l2 : 0.0;
  t = std::fmin(1.0, std::fmax(0.0, t));
  const double dx = px - (ax + t * ex);
  const double dy = py - (ay + t * ey);
  return dx * dx + dy * dy;
}

}  // namespace

TEST_SUITE("simd")
{
  TEST_CASE("scalar table is always available")
  {
    REQUIRE(simd::kernels_for(Isa::kScalar) != nullptr);
    CHECK(simd::kernels_for(Isa::kScalar)->isa == Isa::kScalar);
    CHECK(simd::isa_supported(Isa::kScalar));
    CHECK(simd::to_string(simd::kernels().isa) != "");
  }

  TEST_CASE("scalar kernels against direct oracles")
  {
    const Kernels & k = *simd::kernels_for(Isa::kScalar);
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = static_cast<std::size_t>(test::uniform_int(rng, 0, 37));
      const auto xs = random_values(rng, n, -5, 5);
      const auto ys = random_values(rng, n, -5, 5);
      const double qx = test::uniform(rng, -6, 6);
      const double qy = test::uniform(rng, -6, 6);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, (xs[i] - qx) * (xs[i] - qx) + (ys[i] - qy) * (ys[i] - qy));
      }
      CHECK(k.nearest_dist_sq(qx, qy, xs.data(), ys.data(), n) == best);

      const auto a = random_bits(rng, n);
      const auto b = random_bits(rng, n);
      auto o = a;
      auto x = a;
      k.or_into(o.data(), b.data(), n);
      k.and_into(x.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(o[i] == (a[i] | b[i]));
        CHECK(x[i] == (a[i] & b[i]));
      }

      const auto p = random_values(rng, n, 0, 1);
      const auto t = random_values(rng, n, 0, 1);
      double pt = 0.0;
      double pp = 0.0;
      double tt = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i]) {
          pt += p[i] * t[i];
          pp += p[i] * p[i];
          tt += t[i] * t[i];
        }
      }
      const simd::MaskedSums s = k.masked_sums(p.data(), t.data(), a.data(), n);
      CHECK(s.pt == doctest::Approx(pt).epsilon(1e-13));
      CHECK(s.pp == doctest::Approx(pp).epsilon(1e-13));
      CHECK(s.tt == doctest::Approx(tt).epsilon(1e-13));
    }
    CHECK(std::isinf(k.nearest_dist_sq(0, 0, nullptr, nullptr, 0)));
  }

  TEST_CASE("segment_update against the distance oracle")
  {
    const Kernels & k = *simd::kernels_for(Isa::kScalar);
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = static_cast<std::size_t>(test::uniform_int(rng, 1, 23));
      const auto px = random_values(rng, n, -5, 5);
      const double py = test::uniform(rng, -5, 5);
      std::vector<double> best(n, std::numeric_limits<double>::infinity());
      std::vector<std::int32_t> seg(n, -1);
      std::vector<double> tpar(n, -1.0);
      std::vector<double> want(n, std::numeric_limits<double>::infinity());
      for (int s = 0; s < 4; ++s) {
        const double ax = test::uniform(rng, -5, 5);
        const double ay = test::uniform(rng, -5, 5);
        // One degenerate segment now and then.
        const double bx = s == 3 ? ax : test::uniform(rng, -5, 5);
        const double by = s == 3 ? ay : test::uniform(rng, -5, 5);
        k.segment_update(px.data(), py, n, simd::make_segment(ax, ay, bx, by), s, best.data(), seg.data(), tpar.data());
        for (std::size_t i = 0; i < n; ++i) {
          want[i] = std::min(want[i], seg_d2_oracle(px[i], py, ax, ay, bx, by));
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(best[i] == doctest::Approx(want[i]).epsilon(1e-12));
        CHECK((seg[i] >= 0 && seg[i] < 4));
        CHECK((tpar[i] >= 0.0 && tpar[i] <= 1.0));
      }
    }
  }

  TEST_CASE("avx2 kernels equal the scalar reference bit for bit")
  {
    const Kernels * vec = simd::kernels_for(Isa::kAvx2);
    if (vec == nullptr) {
      MESSAGE("AVX2 not available; equivalence not exercised");
      return;
    }
    const Kernels & ref = *simd::kernels_for(Isa::kScalar);
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
      // Lengths around the vector width, including unaligned tails.
      const std::size_t n = static_cast<std::size_t>(test::uniform_int(rng, 0, 70));
      const auto xs = random_values(rng, n, -50, 50);
      const auto ys = random_values(rng, n, -50, 50);
      const double qx = test::uniform(rng, -60, 60);
      const double qy = test::uniform(rng, -60, 60);
      CHECK(same_bits(ref.nearest_dist_sq(qx, qy, xs.data(), ys.data(), n), vec->nearest_dist_sq(qx, qy, xs.data(), ys.data(), n)));

      const auto a = random_bits(rng, n);
      const auto b = random_bits(rng, n);
      auto r1 = a;
      auto v1 = a;
      ref.or_into(r1.data(), b.data(), n);
      vec->or_into(v1.data(), b.data(), n);
      CHECK(r1 == v1);
      r1 = a;
      v1 = a;
      ref.and_into(r1.data(), b.data(), n);
      vec->and_into(v1.data(), b.data(), n);
      CHECK(r1 == v1);

      const auto p = random_values(rng, n, 0, 1);
      const auto t = random_values(rng, n, 0, 1);
      const simd::MaskedSums sr = ref.masked_sums(p.data(), t.data(), a.data(), n);
      const simd::MaskedSums sv = vec->masked_sums(p.data(), t.data(), a.data(), n);
      CHECK(same_bits(sr.pt, sv.pt));
      CHECK(same_bits(sr.pp, sv.pp));
      CHECK(same_bits(sr.tt, sv.tt));

      std::vector<double> br(n, std::numeric_limits<double>::infinity());
      std::vector<double> bv = br;
      std::vector<std::int32_t> gr(n, -1);
      std::vector<std::int32_t> gv = gr;
      std::vector<double> tr(n, -1.0);
      std::vector<double> tv = tr;
      const double py = test::uniform(rng, -50, 50);
      for (int s = 0; s < 6; ++s) {
        const double ax = test::uniform(rng, -50, 50);
        const double ay = test::uniform(rng, -50, 50);
        const double bx = s == 5 ? ax : test::uniform(rng, -50, 50);
        const double by = s == 5 ? ay : test::uniform(rng, -50, 50);
        const simd::Segment sg = simd::make_segment(ax, ay, bx, by);
        ref.segment_update(xs.data(), py, n, sg, s, br.data(), gr.data(), tr.data());
        vec->segment_update(xs.data(), py, n, sg, s, bv.data(), gv.data(), tv.data());
      }
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(same_bits(br[i], bv[i]));
        CHECK(gr[i] == gv[i]);
        CHECK(same_bits(tr[i], tv[i]));
      }
    }
  }

  TEST_CASE("ties keep the earlier segment")
  {
    for (Isa isa : {Isa::kScalar, Isa::kAvx2}) {
      const Kernels * k = simd::kernels_for(isa);
      if (k == nullptr) {
        continue;
      }
      const std::vector<double> px{0.0, 1.0, 2.0, 3.0, 4.0};
      std::vector<double> best(px.size(), std::numeric_limits<double>::infinity());
      std::vector<std::int32_t> seg(px.size(), -1);
      std::vector<double> t(px.size(), 0.0);
      const simd::Segment s = simd::make_segment(-1, 1, 5, 1);
      k->segment_update(px.data(), 0.0, px.size(), s, 0, best.data(), seg.data(), t.data());
      k->segment_update(px.data(), 0.0, px.size(), s, 1, best.data(), seg.data(), t.data());
      for (std::int32_t g : seg) {
        CHECK(g == 0);
      }
    }
  }
}

}  // namespace pseudomap
