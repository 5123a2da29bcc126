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
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "debug_png.hpp"
#include "pseudomap/config.hpp"
#include "pseudomap/error.hpp"
#include "pseudomap/io.hpp"
#include "pseudomap/parallel.hpp"

namespace fs = std::filesystem;

namespace pseudomap::cli
{
namespace
{

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

struct Globals
{
  std::string config_path;
  int threads = 1;
  bool verbose = false;
  std::string debug_dir;
};

class StageTimer
{
public:
  StageTimer(const Globals & g, std::string name) : on_(g.verbose), name_(std::move(name)), t0_(Clock::now()) {}
  ~StageTimer()
  {
    if (on_) {
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0_).count();
      std::fprintf(stderr, "[time] %-12s %10.2f ms\n", name_.c_str(), ms);
    }
  }

private:
  using Clock = std::chrono::steady_clock;
  bool on_;
  std::string name_;
  Clock::time_point t0_;
};

PipelineConfig effective_config(const Globals & g)
{
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char * env = std::getenv("PSEUDOMAP_CONFIG"); env && *env) {
      path = env;
    }
  }
  PipelineConfig cfg = path.empty() ? PipelineConfig{} : load_config(path);
  if (g.verbose && !path.empty()) {
    std::fprintf(stderr, "config: %s\n", path.c_str());
  }
  return cfg;
}

void revalidate(PipelineConfig & cfg)
{
  cfg.synth.scene.spec = cfg.bev;
  try {
    cfg.validate();
  } catch (const Error & e) {
    fail(ErrorCode::kValidation, std::string("invalid option: ") + e.what());
  }
}

std::string stem_of(const std::string & path) { return fs::path(path).stem().string(); }

std::string join(const std::string & dir, const std::string & name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(ErrorCode::kIo, dir + ": " + ec.message());
  }
}

void write_text(const std::string & path, const std::string & text)
{
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_file_atomic(path, text);
  }
}

BevMask full_mask(const BevSpec & spec) { return BevMask(spec, true); }

// ---- synth -----------------------------------------------------------------

struct SynthOptions
{
  std::uint64_t seed = 0;
  int count = 1;
  std::optional<int> lanes;
  std::optional<double> curvature;
  std::optional<int> crossings;
  std::optional<int> blobs;
  std::optional<double> fov_deg;
  std::optional<int> trips;
  std::string out;
};

int cmd_synth(const Globals & g, const SynthOptions & o)
{
  PipelineConfig cfg = effective_config(g);
  SynthConfig & sc = cfg.synth;
  if (o.lanes) sc.scene.n_lanes = *o.lanes;
  if (o.curvature) sc.scene.curvature = *o.curvature;
  if (o.crossings) sc.scene.n_crossings = *o.crossings;
  if (o.blobs) sc.occlusion.n_blobs = *o.blobs;
  if (o.fov_deg) sc.occlusion.frustum_fov = *o.fov_deg * std::numbers::pi / 180.0;
  if (o.trips) sc.trips = *o.trips;
  revalidate(cfg);
  require(o.count >= 1, "--count must be at least 1");
  ensure_dir(o.out);

  const auto n = static_cast<std::size_t>(o.count);
  std::vector<Json> entries(n);
  StageTimer timer(g, "synth");
  parallel_for(n, [&](std::size_t k) {
    SceneParams sp = sc.scene;
    sp.seed = o.seed + k;
    const std::string name = "scene_" + std::to_string(sp.seed);
    const VectorMap gt = gen_scene(sp);
    const SemanticRaster raster = rasterize_gt(gt, cfg.bev, sp.dash);

    SplitMix64 rng(sp.seed ^ 0x6F63636C7573696FULL);
    std::vector<BevMask> masks;
    Json trip_files = Json::array();
    Json trip_coverage = Json::array();
    for (int t = 0; t < sc.trips; ++t) {
      OcclusionParams op = sc.occlusion;
      op.seed = rng.next();
      const Pose2 pose{0.0, rng.uniform(0.5 * cfg.bev.y_min, 0.5 * cfg.bev.y_max), 0.0};
      masks.push_back(gen_occlusion(op, pose, cfg.bev));
      const std::string file = name + "_trip" + std::to_string(t) + ".pgm";
      save_mask(join(o.out, file), masks.back());
      trip_files.push_back(file);
      trip_coverage.push_back(coverage_ratio(masks.back()));
    }
    const BevMask uni = multi_trip_union(masks);
    SemanticRaster observed = raster;
    for (std::size_t i = 0; i < observed.classes.size(); ++i) {
      if (!uni.grid.bits[i]) {
        observed.classes[i] = static_cast<std::uint8_t>(RasterClass::kUnobserved);
      }
    }
    save_vector_map(join(o.out, name + ".json"), gt);
    save_raster(join(o.out, name + ".pgm"), raster);
    save_raster(join(o.out, name + "_observed.pgm"), observed);
    save_mask(join(o.out, name + "_union.pgm"), uni);
    if (!g.debug_dir.empty()) {
      write_debug_png(join(g.debug_dir, name + ".png"), raster, &uni, &gt);
    }
    entries[k] = Json{{"name", name}, {"gt", name + ".json"}, {"raster", name + ".pgm"},
                      {"observed_raster", name + "_observed.pgm"}, {"trip_masks", trip_files},
                      {"trip_coverage", trip_coverage}, {"union_mask", name + "_union.pgm"},
                      {"union_coverage", coverage_ratio(uni)}};
  });
  write_file_atomic(join(o.out, "manifest.json"), dump_json(Json{{"frames", entries}}));
  return 0;
}

// ---- render ----------------------------------------------------------------

struct RenderOptions
{
  std::vector<std::string> inputs;
  std::string out;
  bool save_surfels = false;
};

int cmd_render(const Globals & g, const RenderOptions & o)
{
  PipelineConfig cfg = effective_config(g);
  ensure_dir(o.out);
  StageTimer timer(g, "render");
  parallel_for(o.inputs.size(), [&](std::size_t k) {
    const SemanticRaster raster = load_raster(o.inputs[k]);
    const BevSpec & spec = raster.spec;
    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::floor((spec.y_max - spec.y_min) / cfg.surfel.pose_step));
    for (std::size_t i = 0; i <= steps; ++i) {
      traj.poses.push_back({0.0, spec.y_min + static_cast<double>(i) * cfg.surfel.pose_step, 0.0});
      traj.timestamps.push_back(static_cast<double>(i));
    }
    SurfelGrid grid = init_meshgrid(traj, cfg.surfel.offset_r, cfg.surfel.spacing);
    paint_surfels(grid, raster, Pose2{});
    const BevRender r = render_bev(grid, Pose2{}, spec, cfg.surfel.render);
    const std::string stem = stem_of(o.inputs[k]);
    save_raster(join(o.out, stem + "_render.pgm"), r.raster);
    if (o.save_surfels) {
      write_file_atomic(join(o.out, stem + "_surfels.json"), dump_json(surfel_grid_to_json(grid)));
    }
    if (!g.debug_dir.empty()) {
      write_debug_png(join(g.debug_dir, stem + "_render.png"), r.raster, nullptr, nullptr);
    }
  });
  return 0;
}

// ---- vectorize -------------------------------------------------------------

struct VectorizeOptions
{
  std::vector<std::string> inputs;
  std::string out;
  std::optional<int> kernel;
  std::optional<double> eps1;
};

int cmd_vectorize(const Globals & g, const VectorizeOptions & o)
{
  PipelineConfig cfg = effective_config(g);
  if (o.kernel) cfg.vectorize.lane_kernel.size = *o.kernel;
  if (o.eps1) cfg.vectorize.eps1 = *o.eps1;
  revalidate(cfg);
  ensure_dir(o.out);
  std::vector<Json> entries(o.inputs.size());
  StageTimer timer(g, "vectorize");
  parallel_for(o.inputs.size(), [&](std::size_t k) {
    const SemanticRaster raster = load_raster(o.inputs[k]);
    const std::string stem = stem_of(o.inputs[k]);
    const VectorizeResult result = vectorize_bev(raster, cfg.vectorize, stem);
    save_vector_map(join(o.out, stem + ".json"), result.map);
    save_mask(join(o.out, stem + "_mask.pgm"), result.mask);
    if (!g.debug_dir.empty()) {
      write_debug_png(join(g.debug_dir, stem + "_vectors.png"), raster, &result.mask, &result.map);
    }
    entries[k] = Json{{"input", o.inputs[k]}, {"map", stem + ".json"}, {"mask", stem + "_mask.pgm"},
                      {"elements", result.map.elements.size()}, {"coverage", coverage_ratio(result.mask)}};
  });
  write_file_atomic(join(o.out, "manifest.json"), dump_json(Json{{"frames", entries}}));
  return 0;
}

// ---- assign / loss ---------------------------------------------------------

struct AssignOptions
{
  std::string pred;
  std::string gt;
  std::string mask;
  std::string assignment;
  std::string out = "-";
  std::optional<std::string> mode;
  std::optional<std::size_t> max_card;
  bool gradients = false;
};

struct Frame
{
  VectorMap pred;
  VectorMap gt;
  BevMask mask;
};

Frame load_frame(const AssignOptions & o)
{
  Frame f{load_vector_map(o.pred), load_vector_map(o.gt), {}};
  f.mask = o.mask.empty() ? full_mask(f.gt.bev_range) : load_mask(o.mask);
  return f;
}

void apply_assign_overrides(PipelineConfig & cfg, const AssignOptions & o)
{
  if (o.mode) cfg.assign.mode = solve_mode_from_string(*o.mode);
  if (o.max_card) cfg.assign.max_card = *o.max_card;
  revalidate(cfg);
}

int cmd_assign(const Globals & g, const AssignOptions & o)
{
  PipelineConfig cfg = effective_config(g);
  apply_assign_overrides(cfg, o);
  const Frame f = load_frame(o);
  AssignmentResult result;
  {
    StageTimer timer(g, "assign");
    result = solve_global(f.pred.elements, f.gt.elements, f.mask, cfg.assign);
  }
  write_text(o.out, dump_json(assignment_to_json(result)));
  return 0;
}

int cmd_loss(const Globals & g, const AssignOptions & o)
{
  PipelineConfig cfg = effective_config(g);
  apply_assign_overrides(cfg, o);
  const Frame f = load_frame(o);
  AssignmentResult assignment;
  if (!o.assignment.empty()) {
    assignment = assignment_from_json(parse_json(read_file(o.assignment), o.assignment), o.assignment);
    require(assignment.predictions.size() == f.pred.elements.size(),
      o.assignment + ": assignment covers " + std::to_string(assignment.predictions.size()) + " predictions, expected " +
        std::to_string(f.pred.elements.size()));
    check_assignment(assignment, f.gt.elements.size());
  } else {
    StageTimer timer(g, "assign");
    assignment = solve_global(f.pred.elements, f.gt.elements, f.mask, cfg.assign);
  }
  LossBreakdown loss;
  {
    StageTimer timer(g, "loss");
    loss = compute_map_losses(f.pred.elements, f.gt.elements, f.mask, assignment, cfg.loss, cfg.assign.L);
  }
  write_text(o.out, dump_json(loss_breakdown_to_json(loss, o.gradients)));
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalOptions
{
  std::vector<std::string> preds;
  std::vector<std::string> gts;
  std::vector<std::string> masks;
  bool observed_only = false;
  std::string out = "-";
  std::string csv;
  std::vector<double> thresholds;
};

// Expands `--pred DIR --gt DIR` into file lists paired by filename. Masks
// from a directory are looked up as <stem>_mask.pgm, <stem>_union.pgm or
// <stem>.pgm, in that order.
EvalOptions expand_dirs(EvalOptions o)
{
  if (o.preds.size() != 1 || o.gts.size() != 1 || !fs::is_directory(o.preds[0])) {
    return o;
  }
  require(fs::is_directory(o.gts[0]), "--pred is a directory, so --gt must be one too");
  const std::string pred_dir = o.preds[0];
  const std::string gt_dir = o.gts[0];
  std::vector<std::string> names;
  for (const auto & entry : fs::directory_iterator(pred_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".json" && name != "manifest.json" &&
        name.find(".meta.json") == std::string::npos) {
      names.push_back(name);
    }
  }
  std::sort(names.begin(), names.end());
  require(!names.empty(), pred_dir + ": no prediction files");
  std::string mask_dir;
  if (o.masks.size() == 1 && fs::is_directory(o.masks[0])) {
    mask_dir = o.masks[0];
  } else {
    require(o.masks.empty(), "--mask must be a directory when --pred is one");
  }
  o.preds.clear();
  o.gts.clear();
  o.masks.clear();
  for (const std::string & name : names) {
    const std::string gt = join(gt_dir, name);
    require(fs::is_regular_file(gt), gt + ": no ground truth for prediction " + name);
    o.preds.push_back(join(pred_dir, name));
    o.gts.push_back(gt);
    if (mask_dir.empty()) {
      continue;
    }
    const std::string stem = stem_of(name);
    std::string found;
    for (const std::string & cand : {stem + "_mask.pgm", stem + "_union.pgm", stem + ".pgm"}) {
      if (found.empty() && fs::is_regular_file(join(mask_dir, cand))) {
        found = join(mask_dir, cand);
      }
    }
    require(!found.empty(), mask_dir + ": no mask for " + name);
    o.masks.push_back(found);
  }
  return o;
}

int cmd_eval(const Globals & g, const EvalOptions & opts)
{
  const EvalOptions o = expand_dirs(opts);
  PipelineConfig cfg = effective_config(g);
  if (!o.thresholds.empty()) cfg.metrics.thresholds = o.thresholds;
  revalidate(cfg);
  require(o.preds.size() == o.gts.size(), "--pred and --gt must list the same number of files");
  require(o.masks.empty() || o.masks.size() == o.gts.size(), "--mask must list one file per frame");
  require(!o.observed_only || !o.masks.empty(), "--observed-only needs --mask");
  const std::size_t n = o.preds.size();
  std::vector<VectorMap> preds(n);
  std::vector<VectorMap> gts(n);
  {
    StageTimer timer(g, "load");
    parallel_for(n, [&](std::size_t k) {
      preds[k] = load_vector_map(o.preds[k]);
      gts[k] = load_vector_map(o.gts[k]);
      if (o.observed_only) {
        gts[k] = mask_gt(gts[k], load_mask(o.masks[k]), cfg.assign.L, cfg.assign.min_points);
      }
    });
  }
  EvalReport report;
  {
    StageTimer timer(g, "chamfer_ap");
    report = chamfer_ap(preds, gts, cfg.metrics);
  }
  write_text(o.out, dump_json(eval_report_to_json(report)));
  if (!o.csv.empty()) {
    write_text(o.csv, eval_report_csv(report));
  }
  if (o.out != "-") {
    std::printf("mean AP %.4f\n", report.mean_ap);
  }
  return 0;
}

// ---- coverage --------------------------------------------------------------

struct CoverageOptions
{
  std::vector<std::string> masks;
  std::optional<double> tau;
  std::string out;
};

int cmd_coverage(const Globals & g, const CoverageOptions & o)
{
  PipelineConfig cfg = effective_config(g);
  if (o.tau) cfg.tau_m = *o.tau;
  revalidate(cfg);
  std::vector<BevMask> masks(o.masks.size());
  parallel_for(masks.size(), [&](std::size_t k) { masks[k] = load_mask(o.masks[k]); });
  const double fraction = coverage_curve(masks, {cfg.tau_m}).front();
  if (!o.out.empty()) {
    std::vector<double> ratios;
    for (const BevMask & m : masks) {
      ratios.push_back(coverage_ratio(m));
    }
    std::vector<double> taus;
    for (int i = 0; i <= 20; ++i) {
      taus.push_back(i / 20.0);
    }
    write_text(o.out, dump_json(Json{{"files", o.masks}, {"ratios", ratios}, {"tau_m", cfg.tau_m},
                                     {"fraction_above", fraction},
                                     {"curve", Json{{"tau", taus}, {"fraction", coverage_curve(masks, taus)}}}}));
  }
  std::printf("%.2f\n", fraction);
  return 0;
}

// ---- config ----------------------------------------------------------------

int cmd_config(const Globals & g, const std::string & out)
{
  write_text(out, dump_config(effective_config(g)));
  return 0;
}

int exit_code(ErrorCode code)
{
  switch (code) {
    case ErrorCode::kInsufficientPredictions: return kExitInfeasible;
    case ErrorCode::kBudgetExceeded: return kExitBudget;
    default: return kExitValidation;
  }
}

int run(int argc, char ** argv)
{
  CLI::App app{"Vector map pseudo-labels from semantic BEV rasters"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config JSON (default: $PSEUDOMAP_CONFIG, else built-in)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--verbose", g.verbose, "Print per-stage timings to stderr");
  app.add_option("--debug-dir", g.debug_dir, "Write colorized PNG renders here");

  SynthOptions so;
  auto * synth = app.add_subcommand("synth", "Generate synthetic scenes, GT rasters and occlusion masks");
  synth->add_option("--seed", so.seed, "Seed of the first scene")->required();
  synth->add_option("--count", so.count, "Number of consecutive seeds");
  synth->add_option("--lanes", so.lanes, "Number of lanes");
  synth->add_option("--curvature", so.curvature, "Road curvature (1/m)");
  synth->add_option("--crossings", so.crossings, "Number of pedestrian crossings");
  synth->add_option("--blobs", so.blobs, "Occluding blobs per trip");
  synth->add_option("--fov", so.fov_deg, "Field of view (degrees)");
  synth->add_option("--trips", so.trips, "Trips per scene");
  synth->add_option("-o,--out", so.out, "Output directory")->required();

  RenderOptions ro;
  auto * render = app.add_subcommand("render", "Paint a surfel meshgrid from rasters and render it back to BEV");
  render->add_option("inputs", ro.inputs, "Semantic raster PGM files")->required();
  render->add_option("-o,--out", ro.out, "Output directory")->required();
  render->add_flag("--save-surfels", ro.save_surfels, "Also write the surfel grid JSON");

  VectorizeOptions vo;
  auto * vectorize = app.add_subcommand("vectorize", "Turn semantic rasters into vector maps and BEV masks");
  vectorize->add_option("inputs", vo.inputs, "Semantic raster PGM files")->required();
  vectorize->add_option("-o,--out", vo.out, "Output directory")->required();
  vectorize->add_option("--kernel", vo.kernel, "Lane dilation kernel size (pixels, odd)");
  vectorize->add_option("--eps1", vo.eps1, "Initial simplification tolerance (m)");

  AssignOptions ao;
  auto * assign = app.add_subcommand("assign", "Mask-aware assignment of predictions to pseudo-labels");
  auto * loss = app.add_subcommand("loss", "Loss terms and gradients for one frame");
  for (auto * sub : {assign, loss}) {
    sub->add_option("--pred", ao.pred, "Prediction vector map JSON")->required();
    sub->add_option("--gt", ao.gt, "Pseudo-label vector map JSON")->required();
    sub->add_option("--mask", ao.mask, "BEV mask PGM (default: all observed)");
    sub->add_option("-o,--out", ao.out, "Output JSON ('-' for stdout)");
    sub->add_option("--mode", ao.mode, "auto, ilp or hungarian");
    sub->add_option("--max-card", ao.max_card, "Largest one-to-many label set (0 = auto)");
  }
  loss->add_option("--assignment", ao.assignment, "Use this assignment JSON instead of solving");
  loss->add_flag("--gradients", ao.gradients, "Include point and class gradients");

  EvalOptions eo;
  auto * eval = app.add_subcommand("eval", "Chamfer AP of predictions against ground truth");
  eval->add_option("--pred", eo.preds, "Prediction vector map JSON files, or a directory")->required();
  eval->add_option("--gt", eo.gts, "Ground-truth JSON files in the same order, or a directory")->required();
  eval->add_option("--mask", eo.masks, "BEV mask PGM files in the same order, or a directory");
  eval->add_flag("--observed-only", eo.observed_only, "Restrict ground truth to the observed area");
  eval->add_option("--thresholds", eo.thresholds, "Chamfer thresholds (m)");
  eval->add_option("-o,--out", eo.out, "Report JSON ('-' for stdout)");
  eval->add_option("--csv", eo.csv, "Also write the report as CSV");

  CoverageOptions co;
  auto * coverage = app.add_subcommand("coverage", "Fraction of masks whose coverage exceeds tau");
  coverage->add_option("masks", co.masks, "BEV mask PGM files")->required();
  coverage->add_option("--tau", co.tau, "Coverage threshold");
  coverage->add_option("-o,--out", co.out, "Per-mask ratios and coverage curve JSON");

  std::string config_out = "-";
  bool dump = false;
  auto * config = app.add_subcommand("config", "Print the effective configuration");
  config->add_flag("--dump", dump, "Emit the full effective config");
  config->add_option("-o,--out", config_out, "Output file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    set_thread_count(g.threads);
    if (!g.debug_dir.empty()) {
      ensure_dir(g.debug_dir);
    }
    if (synth->parsed()) return cmd_synth(g, so);
    if (render->parsed()) return cmd_render(g, ro);
    if (vectorize->parsed()) return cmd_vectorize(g, vo);
    if (assign->parsed()) return cmd_assign(g, ao);
    if (loss->parsed()) return cmd_loss(g, ao);
    if (eval->parsed()) return cmd_eval(g, eo);
    if (coverage->parsed()) return cmd_coverage(g, co);
    if (config->parsed()) return cmd_config(g, config_out);
  } catch (const Error & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.code());
  } catch (const Json::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace pseudomap::cli

int main(int argc, char ** argv) { return pseudomap::cli::run(argc, argv); }
