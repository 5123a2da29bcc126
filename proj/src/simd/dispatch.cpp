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

#include <cstdlib>
#include <string_view>

#include "pseudomap/simd/kernels.hpp"

namespace pseudomap::simd
{

std::string_view to_string(Isa isa)
{
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Segment make_segment(double ax, double ay, double bx, double by)
{
  const double ex = bx - ax;
  const double ey = by - ay;
  const double len2 = ex * ex + ey * ey;
  return {ax, ay, ex, ey, len2 > 0.0 ? 1.0 / len2 : 0.0};
}

bool isa_supported(Isa isa)
{
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(PSEUDOMAP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels * kernels_for(Isa isa)
{
  if (!isa_supported(isa)) {
    return nullptr;
  }
  switch (isa) {
    case Isa::kScalar:
      return &detail::scalar_kernels();
    case Isa::kAvx2:
#if defined(PSEUDOMAP_HAVE_AVX2)
      return &detail::avx2_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Kernels & kernels()
{
  static const Kernels & selected = [] () -> const Kernels & {
    const char * forced = std::getenv("PSEUDOMAP_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return detail::scalar_kernels();
    }
    if (const Kernels * avx2 = kernels_for(Isa::kAvx2)) {
      return *avx2;
    }
    return detail::scalar_kernels();
  }();
  return selected;
}

}  // namespace pseudomap::simd
