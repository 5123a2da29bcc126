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

#include "pseudomap/config.hpp"

#include <cmath>

#include "pseudomap/error.hpp"

namespace pseudomap
{

void SurfelConfig::validate() const
{
  render.validate();
  require(std::isfinite(offset_r) && offset_r > 0.0, "surfel.offset_r must be positive");
  require(std::isfinite(spacing) && spacing > 0.0, "surfel.spacing must be positive");
  require(std::isfinite(pose_step) && pose_step > 0.0, "surfel.pose_step must be positive");
}

void SynthConfig::validate() const
{
  scene.validate();
  occlusion.validate();
  require(trips >= 1 && trips <= 1000, "synth.trips must be in [1, 1000]");
}

void PipelineConfig::validate() const
{
  bev.validate();
  vectorize.validate();
  assign.validate();
  loss.validate();
  metrics.validate();
  surfel.validate();
  synth.validate();
  require(std::isfinite(tau_m) && tau_m >= 0.0 && tau_m <= 1.0, "coverage.tau_m must be in [0, 1]");
}

std::string_view to_string(SolveMode mode)
{
  switch (mode) {
    case SolveMode::kAuto: return "auto";
    case SolveMode::kIlp: return "ilp";
    case SolveMode::kHungarian: return "hungarian";
  }
  return "auto";
}

SolveMode solve_mode_from_string(std::string_view name)
{
  if (name == "auto") return SolveMode::kAuto;
  if (name == "ilp") return SolveMode::kIlp;
  if (name == "hungarian") return SolveMode::kHungarian;
  fail(ErrorCode::kValidation, "unknown solve mode \"" + std::string(name) + "\"");
}

std::string_view to_string(DirectionLossKind kind)
{
  return kind == DirectionLossKind::kNone ? "none" : "turning_angle";
}

DirectionLossKind direction_kind_from_string(std::string_view name)
{
  if (name == "turning_angle") return DirectionLossKind::kTurningAngle;
  if (name == "none") return DirectionLossKind::kNone;
  fail(ErrorCode::kValidation, "unknown direction loss \"" + std::string(name) + "\"");
}

namespace
{

Json kernel_json(const StructuringElement & k)
{
  return Json{{"shape", std::string(to_string(k.shape))}, {"size", k.size}};
}

// Reads optional fields of one config section.
class Section
{
public:
  Section(const Json & parent, std::string_view key, const std::string & where) : where_(where + "." + std::string(key))
  {
    const auto it = parent.find(key);
    if (it != parent.end()) {
      j_ = &*it;
      require(j_->is_object(), where_ + ": expected an object");
    }
  }

  void allow(std::initializer_list<std::string_view> keys) const
  {
    if (j_) {
      check_keys(*j_, keys, where_);
    }
  }

  template <typename T>
  void number(std::string_view key, T & out) const
  {
    const Json * v = find(key);
    if (!v) {
      return;
    }
    if constexpr (std::is_floating_point_v<T>) {
      require(v->is_number(), at(key) + ": expected a number");
      out = v->get<double>();
    } else if constexpr (std::is_unsigned_v<T>) {
      require(v->is_number_unsigned(), at(key) + ": expected a non-negative integer");
      out = v->get<T>();
    } else {
      require(v->is_number_integer(), at(key) + ": expected an integer");
      const long long x = v->get<long long>();
      require(x >= std::numeric_limits<T>::min() && x <= std::numeric_limits<T>::max(), at(key) + ": out of range");
      out = static_cast<T>(x);
    }
  }

  /// null means "no limit" (infinity).
  void number_or_inf(std::string_view key, double & out) const
  {
    const Json * v = find(key);
    if (v && v->is_null()) {
      out = std::numeric_limits<double>::infinity();
    } else {
      number(key, out);
    }
  }

  template <typename F>
  void string(std::string_view key, F && apply) const
  {
    const Json * v = find(key);
    if (!v) {
      return;
    }
    require(v->is_string(), at(key) + ": expected a string");
    try {
      apply(v->get<std::string>());
    } catch (const Error & e) {
      fail(ErrorCode::kValidation, at(key) + ": " + e.what());
    }
  }

  void kernel(std::string_view key, StructuringElement & out) const
  {
    const Json * v = find(key);
    if (!v) {
      return;
    }
    check_keys(*v, {"shape", "size"}, at(key));
    Section s(*j_, key, where_);
    s.string("shape", [&](const std::string & name) { out.shape = shape_from_string(name); });
    s.number("size", out.size);
  }

  void numbers(std::string_view key, std::vector<double> & out) const
  {
    const Json * v = find(key);
    if (!v) {
      return;
    }
    require(v->is_array(), at(key) + ": expected an array");
    out.clear();
    for (const Json & x : *v) {
      require(x.is_number(), at(key) + ": expected numbers");
      out.push_back(x.get<double>());
    }
  }

private:
  const Json * find(std::string_view key) const
  {
    if (!j_) {
      return nullptr;
    }
    const auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }
  std::string at(std::string_view key) const { return where_ + "." + std::string(key); }

  std::string where_;
  const Json * j_ = nullptr;
};

Json inf_or_number(double x) { return std::isinf(x) ? Json(nullptr) : Json(x); }

}  // namespace

Json config_to_json(const PipelineConfig & cfg)
{
  const VectorizeParams & v = cfg.vectorize;
  const AssignParams & a = cfg.assign;
  const LossParams & l = cfg.loss;
  const SceneParams & sc = cfg.synth.scene;
  const OcclusionParams & oc = cfg.synth.occlusion;
  Json j;
  j["bev"] = bev_spec_to_json(cfg.bev);
  j["vectorize"] = Json{{"eps1", v.eps1}, {"max_points", v.max_points}, {"lane_kernel", kernel_json(v.lane_kernel)},
                        {"boundary_kernel", kernel_json(v.boundary_kernel)}, {"min_area", v.artifacts.min_area},
                        {"thick_max", v.artifacts.thick_max}, {"min_branch", v.min_branch}, {"min_length", v.min_length},
                        {"gate_distance", v.gate.distance}, {"gate_angle", v.gate.angle}, {"margin", v.margin}};
  j["assign"] = Json{{"w_cls", a.cost.w_cls}, {"w_pt", a.cost.w_pt}, {"w_rend", a.cost.w_rend},
                     {"sigma", a.cost.raster.sigma}, {"band_width", a.cost.raster.band_width},
                     {"raster_resolution", a.cost.raster_resolution}, {"large_cost", a.cost.large_cost},
                     {"points", a.L}, {"min_points", a.min_points}, {"max_card", a.max_card},
                     {"gate", inf_or_number(a.gate)}, {"budget", a.budget}, {"mode", std::string(to_string(a.mode))}};
  j["loss"] = Json{{"w_cls", l.weights.cls}, {"w_pt", l.weights.pt}, {"w_rend", l.weights.rend},
                   {"w_dir", l.weights.dir}, {"w_bev_seg", l.weights.bev_seg}, {"focal_alpha", l.focal_alpha},
                   {"focal_gamma", l.focal_gamma}, {"sigma", l.raster.sigma}, {"band_width", l.raster.band_width},
                   {"direction", std::string(to_string(l.direction))}};
  j["metrics"] = Json{{"thresholds", cfg.metrics.thresholds}, {"n_samples", cfg.metrics.n_samples}};
  j["surfel"] = Json{{"alpha_min", cfg.surfel.render.alpha_min}, {"cutoff_sigma", cfg.surfel.render.cutoff_sigma},
                     {"offset_r", cfg.surfel.offset_r}, {"spacing", cfg.surfel.spacing},
                     {"pose_step", cfg.surfel.pose_step}};
  j["synth"] = Json{{"n_lanes", sc.n_lanes}, {"lane_width", sc.lane_width}, {"curvature", sc.curvature},
                    {"n_crossings", sc.n_crossings}, {"dash_on", sc.dash.on}, {"dash_off", sc.dash.off},
                    {"n_blobs", oc.n_blobs}, {"blob_radius_min", oc.blob_radius_min},
                    {"blob_radius_max", oc.blob_radius_max}, {"fov", oc.frustum_fov},
                    {"range", inf_or_number(oc.frustum_range)}, {"trips", cfg.synth.trips}};
  j["coverage"] = Json{{"tau_m", cfg.tau_m}};
  return j;
}

PipelineConfig config_from_json(const Json & j, const std::string & where)
{
  check_keys(j, {"bev", "vectorize", "assign", "loss", "metrics", "surfel", "synth", "coverage"}, where);
  PipelineConfig cfg;
  if (const auto it = j.find("bev"); it != j.end()) {
    cfg.bev = bev_spec_from_json(*it, where + ".bev");
  }

  VectorizeParams & v = cfg.vectorize;
  const Section sv(j, "vectorize", where);
  sv.allow({"eps1", "max_points", "lane_kernel", "boundary_kernel", "min_area", "thick_max", "min_branch",
            "min_length", "gate_distance", "gate_angle", "margin"});
  sv.number("eps1", v.eps1);
  sv.number("max_points", v.max_points);
  sv.kernel("lane_kernel", v.lane_kernel);
  sv.kernel("boundary_kernel", v.boundary_kernel);
  sv.number("min_area", v.artifacts.min_area);
  sv.number("thick_max", v.artifacts.thick_max);
  sv.number("min_branch", v.min_branch);
  sv.number("min_length", v.min_length);
  sv.number("gate_distance", v.gate.distance);
  sv.number("gate_angle", v.gate.angle);
  sv.number("margin", v.margin);

  AssignParams & a = cfg.assign;
  const Section sa(j, "assign", where);
  sa.allow({"w_cls", "w_pt", "w_rend", "sigma", "band_width", "raster_resolution", "large_cost", "points",
            "min_points", "max_card", "gate", "budget", "mode"});
  sa.number("w_cls", a.cost.w_cls);
  sa.number("w_pt", a.cost.w_pt);
  sa.number("w_rend", a.cost.w_rend);
  sa.number("sigma", a.cost.raster.sigma);
  sa.number("band_width", a.cost.raster.band_width);
  sa.number("raster_resolution", a.cost.raster_resolution);
  sa.number("large_cost", a.cost.large_cost);
  sa.number("points", a.L);
  sa.number("min_points", a.min_points);
  sa.number("max_card", a.max_card);
  sa.number_or_inf("gate", a.gate);
  sa.number("budget", a.budget);
  sa.string("mode", [&](const std::string & s) { a.mode = solve_mode_from_string(s); });

  LossParams & l = cfg.loss;
  const Section sl(j, "loss", where);
  sl.allow({"w_cls", "w_pt", "w_rend", "w_dir", "w_bev_seg", "focal_alpha", "focal_gamma", "sigma", "band_width",
            "direction"});
  sl.number("w_cls", l.weights.cls);
  sl.number("w_pt", l.weights.pt);
  sl.number("w_rend", l.weights.rend);
  sl.number("w_dir", l.weights.dir);
  sl.number("w_bev_seg", l.weights.bev_seg);
  sl.number("focal_alpha", l.focal_alpha);
  sl.number("focal_gamma", l.focal_gamma);
  sl.number("sigma", l.raster.sigma);
  sl.number("band_width", l.raster.band_width);
  sl.string("direction", [&](const std::string & s) { l.direction = direction_kind_from_string(s); });

  const Section sm(j, "metrics", where);
  sm.allow({"thresholds", "n_samples"});
  sm.numbers("thresholds", cfg.metrics.thresholds);
  sm.number("n_samples", cfg.metrics.n_samples);

  const Section ss(j, "surfel", where);
  ss.allow({"alpha_min", "cutoff_sigma", "offset_r", "spacing", "pose_step"});
  ss.number("alpha_min", cfg.surfel.render.alpha_min);
  ss.number("cutoff_sigma", cfg.surfel.render.cutoff_sigma);
  ss.number("offset_r", cfg.surfel.offset_r);
  ss.number("spacing", cfg.surfel.spacing);
  ss.number("pose_step", cfg.surfel.pose_step);

  SceneParams & sc = cfg.synth.scene;
  OcclusionParams & oc = cfg.synth.occlusion;
  const Section sy(j, "synth", where);
  sy.allow({"n_lanes", "lane_width", "curvature", "n_crossings", "dash_on", "dash_off", "n_blobs", "blob_radius_min",
            "blob_radius_max", "fov", "range", "trips"});
  sy.number("n_lanes", sc.n_lanes);
  sy.number("lane_width", sc.lane_width);
  sy.number("curvature", sc.curvature);
  sy.number("n_crossings", sc.n_crossings);
  sy.number("dash_on", sc.dash.on);
  sy.number("dash_off", sc.dash.off);
  sy.number("n_blobs", oc.n_blobs);
  sy.number("blob_radius_min", oc.blob_radius_min);
  sy.number("blob_radius_max", oc.blob_radius_max);
  sy.number("fov", oc.frustum_fov);
  sy.number_or_inf("range", oc.frustum_range);
  sy.number("trips", cfg.synth.trips);
  sc.spec = cfg.bev;

  const Section sc2(j, "coverage", where);
  sc2.allow({"tau_m"});
  sc2.number("tau_m", cfg.tau_m);

  try {
    cfg.validate();
  } catch (const Error & e) {
    fail(ErrorCode::kValidation, where + ": " + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::string & path)
{
  return config_from_json(parse_json(read_file(path), path), path);
}

std::string dump_config(const PipelineConfig & cfg) { return dump_json(config_to_json(cfg)); }

}  // namespace pseudomap
