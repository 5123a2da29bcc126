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

#ifndef PSEUDOMAP__CLI__DEBUG_PNG_HPP_
#define PSEUDOMAP__CLI__DEBUG_PNG_HPP_

#include <string>

#include "pseudomap/geometry.hpp"
#include "pseudomap/raster.hpp"

namespace pseudomap::cli
{

/// Colorized class raster, unobserved cells dimmed by `mask` when given,
/// with `overlay` elements drawn on top.
void write_debug_png(
  const std::string & path, const SemanticRaster & raster, const BevMask * mask, const VectorMap * overlay);

}  // namespace pseudomap::cli

#endif  // PSEUDOMAP__CLI__DEBUG_PNG_HPP_
