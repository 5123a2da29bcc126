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

#ifndef PSEUDOMAP__CONFIG_HPP_
#define PSEUDOMAP__CONFIG_HPP_

#include <string>
#include <string_view>

#include "pseudomap/assign.hpp"
#include "pseudomap/io.hpp"
#include "pseudomap/map_losses.hpp"
#include "pseudomap/metrics.hpp"
#include "pseudomap/surfel.hpp"
#include "pseudomap/synth.hpp"
#include "pseudomap/vectorize.hpp"

namespace pseudomap
{

struct SurfelConfig
{
  RenderParams render;
  double offset_r = 7.0;   // meters
  double spacing = 0.05;   // meters
  double pose_step = 5.0;  // meters between poses of the default trajectory

  void validate() const;
  friend bool operator==(const SurfelConfig &, const SurfelConfig &) = default;
};

struct SynthConfig
{
  SceneParams scene;
  OcclusionParams occlusion;
  int trips = 1;

  void validate() const;
  friend bool operator==(const SynthConfig &, const SynthConfig &) = default;
};

/// Every tunable of the pipeline in one document. Seeds are per-invocation
/// and live on the command line, not here.
struct PipelineConfig
{
  BevSpec bev;
  VectorizeParams vectorize;
  AssignParams assign;
  LossParams loss;
  ApConfig metrics;
  SurfelConfig surfel;
  SynthConfig synth;
  double tau_m = 0.5;  // coverage filter

  void validate() const;
  friend bool operator==(const PipelineConfig &, const PipelineConfig &) = default;
};

Json config_to_json(const PipelineConfig & cfg);
/// Missing fields keep their defaults; unknown fields are rejected.
PipelineConfig config_from_json(const Json & j, const std::string & where);
PipelineConfig load_config(const std::string & path);
std::string dump_config(const PipelineConfig & cfg);

std::string_view to_string(SolveMode mode);
SolveMode solve_mode_from_string(std::string_view name);
std::string_view to_string(DirectionLossKind kind);
DirectionLossKind direction_kind_from_string(std::string_view name);

}  // namespace pseudomap

#endif  // PSEUDOMAP__CONFIG_HPP_
