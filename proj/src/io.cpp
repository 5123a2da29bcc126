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

#include "pseudomap/io.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pseudomap/error.hpp"

namespace pseudomap
{

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::kIo, path + ": cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string & path, std::string_view bytes)
{
  // Devices and pipes (e.g. /dev/stdout) cannot be replaced by a rename.
  std::error_code st_ec;
  const auto st = std::filesystem::status(path, st_ec);
  if (!st_ec && std::filesystem::exists(st) && !std::filesystem::is_regular_file(st)) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      fail(ErrorCode::kIo, path + ": write failed");
    }
    return;
  }
  static std::atomic<unsigned> counter{0};
  const std::string tmp = path + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorCode::kIo, path + ": cannot create file");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      fail(ErrorCode::kIo, path + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorCode::kIo, path + ": " + ec.message());
  }
}

Json parse_json(std::string_view text, const std::string & source)
{
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error & e) {
    fail(ErrorCode::kValidation, source + ": " + e.what());
  }
}

std::string dump_json(const Json & j) { return j.dump(2) + "\n"; }

void check_keys(const Json & j, std::initializer_list<std::string_view> allowed, const std::string & where)
{
  require(j.is_object(), where + ": expected an object");
  for (const auto & [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) {
      known = known || key == a;
    }
    require(known, where + ": unknown field \"" + key + "\"");
  }
}

namespace
{

const Json & field(const Json & j, std::string_view key, const std::string & where)
{
  const auto it = j.find(key);
  require(it != j.end(), where + ": missing field \"" + std::string(key) + "\"");
  return *it;
}

double as_number(const Json & v, const std::string & where)
{
  require(v.is_number(), where + ": expected a number");
  return v.get<double>();
}

long long as_integer(const Json & v, const std::string & where)
{
  require(v.is_number_integer(), where + ": expected an integer");
  return v.get<long long>();
}

std::string as_string(const Json & v, const std::string & where)
{
  require(v.is_string(), where + ": expected a string");
  return v.get<std::string>();
}

const Json & as_array(const Json & v, const std::string & where)
{
  require(v.is_array(), where + ": expected an array");
  return v;
}

std::vector<double> number_list(const Json & v, const std::string & where)
{
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(v, where).size(); ++i) {
    out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<int> index_list(const Json & v, const std::string & where)
{
  std::vector<int> out;
  for (std::size_t i = 0; i < as_array(v, where).size(); ++i) {
    const long long x = as_integer(v[i], where + "[" + std::to_string(i) + "]");
    require(x >= 0 && x <= 1'000'000'000, where + ": index out of range");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

template <std::size_t N>
std::array<double, N> fixed_list(const Json & v, const std::string & where)
{
  const std::vector<double> xs = number_list(v, where);
  require(xs.size() == N, where + ": expected " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  std::copy(xs.begin(), xs.end(), out.begin());
  return out;
}

}  // namespace

double get_number(const Json & j, std::string_view key, const std::string & where)
{
  return as_number(field(j, key, where), where + "." + std::string(key));
}

Json bev_spec_to_json(const BevSpec & spec)
{
  return Json{{"x_min", spec.x_min}, {"x_max", spec.x_max}, {"y_min", spec.y_min}, {"y_max", spec.y_max},
              {"resolution", spec.resolution}};
}

BevSpec bev_spec_from_json(const Json & j, const std::string & where)
{
  check_keys(j, {"x_min", "x_max", "y_min", "y_max", "resolution"}, where);
  BevSpec spec;
  spec.x_min = get_number(j, "x_min", where);
  spec.x_max = get_number(j, "x_max", where);
  spec.y_min = get_number(j, "y_min", where);
  spec.y_max = get_number(j, "y_max", where);
  spec.resolution = get_number(j, "resolution", where);
  try {
    spec.validate();
  } catch (const Error & e) {
    fail(ErrorCode::kValidation, where + ": " + e.what());
  }
  return spec;
}

Json vector_map_to_json(const VectorMap & map)
{
  Json elements = Json::array();
  for (const MapElement & e : map.elements) {
    Json points = Json::array();
    for (const Point2 & p : e.points) {
      points.push_back(Json::array({p.x, p.y}));
    }
    elements.push_back(Json{{"class", std::string(to_string(e.cls))}, {"kind", std::string(to_string(e.kind))},
                            {"confidence", e.confidence ? Json(*e.confidence) : Json(nullptr)},
                            {"points", std::move(points)}});
  }
  return Json{{"frame", map.frame}, {"bev_range", bev_spec_to_json(map.bev_range)}, {"elements", std::move(elements)}};
}

VectorMap vector_map_from_json(const Json & j, const std::string & where)
{
  check_keys(j, {"frame", "bev_range", "elements"}, where);
  VectorMap map;
  map.frame = as_string(field(j, "frame", where), where + ".frame");
  map.bev_range = bev_spec_from_json(field(j, "bev_range", where), where + ".bev_range");
  const Json & elements = as_array(field(j, "elements", where), where + ".elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string at = where + ".elements[" + std::to_string(i) + "]";
    const Json & ej = elements[i];
    check_keys(ej, {"class", "kind", "confidence", "points"}, at);
    MapElement e;
    try {
      e.cls = map_class_from_string(as_string(field(ej, "class", at), at + ".class"));
      e.kind = element_kind_from_string(as_string(field(ej, "kind", at), at + ".kind"));
    } catch (const Error & err) {
      fail(ErrorCode::kValidation, at + ": " + err.what());
    }
    const auto conf = ej.find("confidence");
    if (conf != ej.end() && !conf->is_null()) {
      e.confidence = as_number(*conf, at + ".confidence");
    }
    const Json & pts = as_array(field(ej, "points", at), at + ".points");
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto xy = fixed_list<2>(pts[k], at + ".points[" + std::to_string(k) + "]");
      e.points.push_back({xy[0], xy[1]});
    }
    try {
      validate_element(e);
    } catch (const Error & err) {
      fail(ErrorCode::kValidation, at + ": " + err.what());
    }
    map.elements.push_back(std::move(e));
  }
  return map;
}

std::string dump_vector_map(const VectorMap & map) { return dump_json(vector_map_to_json(map)); }

VectorMap parse_vector_map(std::string_view text, const std::string & source)
{
  return vector_map_from_json(parse_json(text, source), source);
}

VectorMap load_vector_map(const std::string & path) { return parse_vector_map(read_file(path), path); }

void save_vector_map(const std::string & path, const VectorMap & map) { write_file_atomic(path, dump_vector_map(map)); }

std::string encode_pgm(const PgmImage & image)
{
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char *>(image.pixels.data()), image.pixels.size());
  return out;
}

PgmImage decode_pgm(std::string_view bytes, const std::string & source)
{
  std::size_t pos = 0;
  auto where = [&](std::size_t at) { return source + ": byte offset " + std::to_string(at) + ": "; };
  auto skip_space = [&]() {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') {
          ++pos;
        }
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char * what) {
    skip_space();
    const std::size_t start = pos;
    long long v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9' && pos - start < 9) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
    }
    require(pos > start, where(start) + "expected " + what);
    return static_cast<int>(v);
  };
  require(bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5', where(0) + "not a binary PGM (P5) file");
  pos = 2;
  PgmImage img;
  img.width = read_int("width");
  img.height = read_int("height");
  const std::size_t maxval_at = pos;
  const int maxval = read_int("maxval");
  require(maxval == 255, where(maxval_at) + "maxval must be 255");
  require(pos < bytes.size() && (bytes[pos] == ' ' || bytes[pos] == '\n' || bytes[pos] == '\r' || bytes[pos] == '\t'),
    where(pos) + "expected whitespace before pixel data");
  ++pos;
  require(img.width > 0 && img.height > 0, where(0) + "image dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  require(bytes.size() - pos == n, where(pos) + "expected " + std::to_string(n) + " pixel bytes, found " +
    std::to_string(bytes.size() - pos));
  img.pixels.assign(reinterpret_cast<const std::uint8_t *>(bytes.data() + pos),
    reinterpret_cast<const std::uint8_t *>(bytes.data() + pos) + n);
  return img;
}

std::string meta_path(const std::string & pgm_path)
{
  constexpr std::string_view ext = ".pgm";
  if (pgm_path.size() >= ext.size() && pgm_path.compare(pgm_path.size() - ext.size(), ext.size(), ext) == 0) {
    return pgm_path.substr(0, pgm_path.size() - ext.size()) + ".meta.json";
  }
  return pgm_path + ".meta.json";
}

std::string raster_meta_json(const BevSpec & spec, bool mask)
{
  Json palette;
  if (mask) {
    palette = Json{{"0", "unobserved"}, {"255", "observed"}};
  } else {
    for (int k = 0; k < kNumRasterClasses; ++k) {
      palette[std::to_string(k)] = std::string(to_string(static_cast<RasterClass>(k)));
    }
  }
  return dump_json(Json{{"bev_range", bev_spec_to_json(spec)}, {"kind", mask ? "mask" : "semantic"}, {"palette", palette}});
}

namespace
{

BevSpec load_meta(const std::string & pgm_path, bool mask)
{
  const std::string path = meta_path(pgm_path);
  const Json j = parse_json(read_file(path), path);
  check_keys(j, {"bev_range", "kind", "palette"}, path);
  const std::string kind = as_string(field(j, "kind", path), path + ".kind");
  require(kind == (mask ? "mask" : "semantic"), path + ": expected kind \"" + (mask ? "mask" : "semantic") + "\"");
  return bev_spec_from_json(field(j, "bev_range", path), path + ".bev_range");
}

}  // namespace

void save_raster(const std::string & path, const SemanticRaster & raster)
{
  raster.validate();
  write_file_atomic(path, encode_pgm({raster.width, raster.height, raster.classes}));
  write_file_atomic(meta_path(path), raster_meta_json(raster.spec, false));
}

SemanticRaster load_raster(const std::string & path)
{
  const BevSpec spec = load_meta(path, false);
  const PgmImage img = decode_pgm(read_file(path), path);
  require(img.width == spec.width() && img.height == spec.height(),
    path + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) + " but bev_range implies " +
      std::to_string(spec.width()) + "x" + std::to_string(spec.height()));
  SemanticRaster raster(spec, RasterClass::kUnobserved);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    require(img.pixels[i] < kNumRasterClasses, path + ": pixel " + std::to_string(i) + " has unknown class id " +
      std::to_string(img.pixels[i]));
  }
  raster.classes = img.pixels;
  return raster;
}

void save_mask(const std::string & path, const BevMask & mask)
{
  mask.validate();
  PgmImage img{mask.width(), mask.height(), {}};
  img.pixels.reserve(mask.grid.bits.size());
  for (std::uint8_t b : mask.grid.bits) {
    img.pixels.push_back(b ? 255 : 0);
  }
  write_file_atomic(path, encode_pgm(img));
  write_file_atomic(meta_path(path), raster_meta_json(mask.spec, true));
}

BevMask load_mask(const std::string & path)
{
  const BevSpec spec = load_meta(path, true);
  const PgmImage img = decode_pgm(read_file(path), path);
  require(img.width == spec.width() && img.height == spec.height(), path + ": image size does not match bev_range");
  BevMask mask(spec, false);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    require(img.pixels[i] == 0 || img.pixels[i] == 255,
      path + ": pixel " + std::to_string(i) + " must be 0 or 255, found " + std::to_string(img.pixels[i]));
    mask.grid.bits[i] = img.pixels[i] ? 1 : 0;
  }
  return mask;
}

Json surfel_grid_to_json(const SurfelGrid & grid)
{
  Json surfels = Json::array();
  for (const Surfel & s : grid.surfels) {
    surfels.push_back(Json{{"center", s.center}, {"rotation", s.rotation}, {"scale", s.scale}, {"opacity", s.opacity},
                           {"color", s.color}, {"class_probs", s.class_probs}});
  }
  Json traj = Json::array();
  for (const Pose2 & p : grid.source_trajectory) {
    traj.push_back(Json{{"x", p.x}, {"y", p.y}, {"heading", p.heading}});
  }
  return Json{{"spacing", grid.spacing}, {"source_trajectory", traj}, {"surfels", surfels}};
}

SurfelGrid surfel_grid_from_json(const Json & j, const std::string & where)
{
  check_keys(j, {"spacing", "source_trajectory", "surfels"}, where);
  SurfelGrid grid;
  grid.spacing = get_number(j, "spacing", where);
  const Json & traj = as_array(field(j, "source_trajectory", where), where + ".source_trajectory");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::string at = where + ".source_trajectory[" + std::to_string(i) + "]";
    check_keys(traj[i], {"x", "y", "heading"}, at);
    grid.source_trajectory.push_back({get_number(traj[i], "x", at), get_number(traj[i], "y", at),
                                      get_number(traj[i], "heading", at)});
  }
  const Json & surfels = as_array(field(j, "surfels", where), where + ".surfels");
  for (std::size_t i = 0; i < surfels.size(); ++i) {
    const std::string at = where + ".surfels[" + std::to_string(i) + "]";
    const Json & sj = surfels[i];
    check_keys(sj, {"center", "rotation", "scale", "opacity", "color", "class_probs"}, at);
    Surfel s;
    s.center = fixed_list<3>(field(sj, "center", at), at + ".center");
    s.rotation = fixed_list<4>(field(sj, "rotation", at), at + ".rotation");
    s.scale = fixed_list<2>(field(sj, "scale", at), at + ".scale");
    s.opacity = get_number(sj, "opacity", at);
    s.color = fixed_list<3>(field(sj, "color", at), at + ".color");
    s.class_probs = fixed_list<kNumSurfelClasses>(field(sj, "class_probs", at), at + ".class_probs");
    grid.surfels.push_back(s);
  }
  try {
    grid.validate();
  } catch (const Error & e) {
    fail(ErrorCode::kValidation, where + ": " + e.what());
  }
  return grid;
}

Json assignment_to_json(const AssignmentResult & result)
{
  Json matches = Json::array();
  Json unassigned = Json::array();
  for (std::size_t i = 0; i < result.predictions.size(); ++i) {
    const PredictionAssignment & pa = result.predictions[i];
    if (pa.outcome == Outcome::kUnassigned) {
      unassigned.push_back(i);
      continue;
    }
    matches.push_back(Json{{"pred", i}, {"labels", pa.labels}, {"local", pa.local}, {"cost", pa.cost}});
  }
  return Json{{"matches", matches}, {"unassigned_preds", unassigned}, {"total_cost", result.total_cost}};
}

AssignmentResult assignment_from_json(const Json & j, const std::string & where)
{
  check_keys(j, {"matches", "unassigned_preds", "total_cost"}, where);
  AssignmentResult out;
  out.total_cost = get_number(j, "total_cost", where);
  const Json & matches = as_array(field(j, "matches", where), where + ".matches");
  const std::vector<int> unassigned = index_list(field(j, "unassigned_preds", where), where + ".unassigned_preds");
  std::size_t n = 0;
  std::vector<std::pair<int, PredictionAssignment>> parsed;
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const std::string at = where + ".matches[" + std::to_string(m) + "]";
    check_keys(matches[m], {"pred", "labels", "local", "cost"}, at);
    const long long pred = as_integer(field(matches[m], "pred", at), at + ".pred");
    require(pred >= 0 && pred <= 1'000'000, at + ": prediction index out of range");
    PredictionAssignment pa;
    pa.labels = index_list(field(matches[m], "labels", at), at + ".labels");
    pa.local = index_list(field(matches[m], "local", at), at + ".local");
    pa.cost = get_number(matches[m], "cost", at);
    require(!pa.labels.empty(), at + ": a match needs at least one label");
    pa.outcome = pa.local.empty() ? Outcome::kOneToOne : Outcome::kOneToMany;
    require(pa.outcome == Outcome::kOneToMany || pa.labels.size() == 1, at + ": one-to-one match with several labels");
    n = std::max(n, static_cast<std::size_t>(pred) + 1);
    parsed.push_back({static_cast<int>(pred), std::move(pa)});
  }
  for (int u : unassigned) {
    n = std::max(n, static_cast<std::size_t>(u) + 1);
  }
  out.predictions.resize(n);
  std::vector<std::uint8_t> seen(n, 0);
  for (auto & [pred, pa] : parsed) {
    require(!seen[pred], where + ": prediction " + std::to_string(pred) + " appears twice");
    seen[pred] = 1;
    out.predictions[pred] = std::move(pa);
  }
  for (int u : unassigned) {
    require(!seen[u], where + ": prediction " + std::to_string(u) + " appears twice");
    seen[u] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(seen[i], where + ": prediction " + std::to_string(i) + " is missing");
  }
  return out;
}

Json eval_report_to_json(const EvalReport & report)
{
  Json classes;
  for (MapClass cls : kAllMapClasses) {
    const ClassReport & cr = report.classes[static_cast<int>(cls)];
    classes[std::string(to_string(cls))] = Json{{"ap", cr.ap}, {"mean_ap", cr.mean_ap}, {"tp", cr.tp}, {"fp", cr.fp},
                                                {"fn", cr.fn}, {"n_gt", cr.n_gt}, {"n_pred", cr.n_pred}};
  }
  return Json{{"thresholds", report.thresholds}, {"classes", classes}, {"mean_ap", report.mean_ap}};
}

std::string eval_report_csv(const EvalReport & report)
{
  std::string out = "threshold,ped,div,bdry,mean\n";
  char buf[256];
  auto row = [&](const std::string & label, double ped, double div, double bdry) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f\n", label.c_str(), ped, div, bdry, (ped + div + bdry) / 3.0);
    out += buf;
  };
  const auto & c = report.classes;
  for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%g", report.thresholds[t]);
    row(buf, c[0].ap[t], c[1].ap[t], c[2].ap[t]);
  }
  row("mean", c[0].mean_ap, c[1].mean_ap, c[2].mean_ap);
  return out;
}

Json loss_breakdown_to_json(const LossBreakdown & loss, bool with_gradients)
{
  Json terms;
  for (int k = 0; k < kNumLossTerms; ++k) {
    terms[std::string(to_string(static_cast<LossTerm>(k)))] = loss.terms[k];
  }
  Json out{{"terms", terms}, {"total", loss.total}};
  if (with_gradients) {
    Json gp = Json::array();
    for (const auto & pts : loss.grad_points) {
      Json one = Json::array();
      for (const Point2 & p : pts) {
        one.push_back(Json::array({p.x, p.y}));
      }
      gp.push_back(one);
    }
    out["grad_points"] = gp;
    out["grad_class"] = loss.grad_class;
  }
  return out;
}

}  // namespace pseudomap
