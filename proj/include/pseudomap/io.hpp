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

#ifndef PSEUDOMAP__IO_HPP_
#define PSEUDOMAP__IO_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pseudomap/assign.hpp"
#include "pseudomap/geometry.hpp"
#include "pseudomap/loss.hpp"
#include "pseudomap/metrics.hpp"
#include "pseudomap/raster.hpp"
#include "pseudomap/surfel.hpp"

namespace pseudomap
{

using Json = nlohmann::json;

// Every reader throws Error(kValidation) with the source name and a line,
// byte offset or JSON path; missing files raise Error(kIo).

std::string read_file(const std::string & path);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string & path, std::string_view bytes);

Json parse_json(std::string_view text, const std::string & source);
/// Two-space indented, sorted keys, trailing newline.
std::string dump_json(const Json & j);

/// Strict object access: rejects keys outside `allowed`.
void check_keys(const Json & j, std::initializer_list<std::string_view> allowed, const std::string & where);
double get_number(const Json & j, std::string_view key, const std::string & where);

Json bev_spec_to_json(const BevSpec & spec);
BevSpec bev_spec_from_json(const Json & j, const std::string & where);

Json vector_map_to_json(const VectorMap & map);
VectorMap vector_map_from_json(const Json & j, const std::string & where);
std::string dump_vector_map(const VectorMap & map);
VectorMap parse_vector_map(std::string_view text, const std::string & source);
VectorMap load_vector_map(const std::string & path);
void save_vector_map(const std::string & path, const VectorMap & map);

struct PgmImage
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

std::string encode_pgm(const PgmImage & image);
PgmImage decode_pgm(std::string_view bytes, const std::string & source);

/// "<dir>/<name>.pgm" -> "<dir>/<name>.meta.json".
std::string meta_path(const std::string & pgm_path);

std::string raster_meta_json(const BevSpec & spec, bool mask);
void save_raster(const std::string & path, const SemanticRaster & raster);
SemanticRaster load_raster(const std::string & path);
void save_mask(const std::string & path, const BevMask & mask);
BevMask load_mask(const std::string & path);

Json surfel_grid_to_json(const SurfelGrid & grid);
SurfelGrid surfel_grid_from_json(const Json & j, const std::string & where);

Json assignment_to_json(const AssignmentResult & result);
AssignmentResult assignment_from_json(const Json & j, const std::string & where);

Json eval_report_to_json(const EvalReport & report);
/// Rows per threshold plus a mean row; columns ped, div, bdry, mean.
std::string eval_report_csv(const EvalReport & report);

Json loss_breakdown_to_json(const LossBreakdown & loss, bool with_gradients);

}  // namespace pseudomap

#endif  // PSEUDOMAP__IO_HPP_
