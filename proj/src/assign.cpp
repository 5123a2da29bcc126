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

#include "pseudomap/assign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pseudomap/error.hpp"
#include "pseudomap/parallel.hpp"
#include "pseudomap/simd/kernels.hpp"

namespace pseudomap
{
namespace
{

struct Sample
{
  Point2 p;
  double s = 0.0;      // arc position
  bool vertex = false;
  bool observed = false;
};

}  // namespace

MapElement standardize(const MapElement & element, std::size_t L)
{
  if (element.points.size() == L) {
    return element;
  }
  return resample(element, L);
}

std::vector<ObservedRun> observed_runs(
  const MapElement & element, const BevMask & mask, std::size_t L, std::size_t min_points)
{
  require(L >= 2, "L must be at least 2");
  const std::vector<Point2> & pts = element.points;
  const std::size_t n = pts.size();
  const bool closed = element.closed() && n >= 3;
  const double total = arc_length(pts, closed);
  if (n < 2 || total <= 0.0) {
    return {};
  }
  const double spacing = closed ? total / static_cast<double>(L) : total / static_cast<double>(L - 1);
  const double step = 0.5 / mask.spec.resolution;

  std::vector<Sample> samples;
  const std::size_t edges = closed ? n : n - 1;
  double s = 0.0;
  for (std::size_t i = 0; i < edges; ++i) {
    const Point2 a = pts[i];
    const Point2 b = pts[(i + 1) % n];
    const double len = distance(a, b);
    const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step)));
    for (std::size_t k = 0; k < m; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(m);
      samples.push_back({a + f * (b - a), s + f * len, k == 0, false});
    }
    s += len;
  }
  samples.push_back({closed ? pts[0] : pts[n - 1], s, true, false});
  bool all = true;
  for (Sample & smp : samples) {
    smp.observed = mask.observed_at(smp.p);
    all = all && smp.observed;
  }
  if (all) {
    if (L < min_points) {
      return {};
    }
    return {{pts, closed}};
  }

  // Runs of consecutive observed samples as [first, last] index pairs.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].observed) {
      continue;
    }
    std::size_t j = i;
    while (j + 1 < samples.size() && samples[j + 1].observed) {
      ++j;
    }
    spans.push_back({i, j});
    i = j;
  }
  const bool wrap = closed && spans.size() >= 2 && spans.front().first == 0 &&
    spans.back().second == samples.size() - 1;

  auto collect = [&](std::size_t lo, std::size_t hi, std::vector<Point2> & out) {
    for (std::size_t i = lo; i <= hi; ++i) {
      if (i == lo || i == hi || samples[i].vertex) {
        if (out.empty() || !(out.back() == samples[i].p)) {
          out.push_back(samples[i].p);
        }
      }
    }
  };
  std::vector<ObservedRun> runs;
  auto emit = [&](std::vector<Point2> points, double length) {
    const auto count = static_cast<std::size_t>(std::floor(length / spacing + 1e-9)) + 1;
    if (count >= min_points && points.size() >= 2 && length > 0.0) {
      runs.push_back({std::move(points), false});
    }
  };
  const std::size_t first = wrap ? 1 : 0;
  const std::size_t last = wrap ? spans.size() - 1 : spans.size();
  for (std::size_t r = first; r < last; ++r) {
    std::vector<Point2> points;
    collect(spans[r].first, spans[r].second, points);
    emit(std::move(points), samples[spans[r].second].s - samples[spans[r].first].s);
  }
  if (wrap) {
    std::vector<Point2> points;
    collect(spans.back().first, spans.back().second, points);
    collect(spans.front().first, spans.front().second, points);
    const double length = (samples[spans.back().second].s - samples[spans.back().first].s) +
      (samples[spans.front().second].s - samples[spans.front().first].s);
    emit(std::move(points), length);
  }
  return runs;
}

Subsegments split_by_mask(const MapElement & q, const BevMask & mask, std::size_t L, std::size_t min_points)
{
  Subsegments out;
  for (ObservedRun & run : observed_runs(q, mask, L, min_points)) {
    MapElement seg;
    seg.cls = q.cls;
    seg.confidence = q.confidence;
    seg.kind = run.whole_ring ? ElementKind::kPolygon : ElementKind::kPolyline;
    // A fully observed element that already has L points is its own
    // segment; resampling again would cut its corners a second time.
    if (run.points == q.points && q.points.size() == L) {
      seg.points = q.points;
    } else {
      seg.points = resample(run.points, L, run.whole_ring);
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

void CostParams::validate() const
{
  require(w_cls >= 0.0 && w_pt >= 0.0 && w_rend >= 0.0, "cost weights must be non-negative");
  raster.validate();
  require(raster_resolution > 0.0, "cost raster resolution must be positive");
  require(large_cost > 0.0 && std::isfinite(large_cost), "large_cost must be positive and finite");
}

double snap_cost(double c)
{
  constexpr double kScale = 1048576.0;  // 2^20
  return std::round(c * kScale) / kScale;
}

namespace
{

// Soft raster of one element on a window of the global lattice at the cost
// resolution, truncated at 4 sigma beyond the band.
struct LocalRaster
{
  long c0 = 0;
  long r0 = 0;
  long w = 0;
  long h = 0;
  std::vector<double> v;
  double self = 0.0;  // sum of v^2

  double at(long r, long c) const { return v[static_cast<std::size_t>((r - r0) * w + (c - c0))]; }
};

LocalRaster local_raster(const MapElement & e, const CostParams & params)
{
  const double res = params.raster_resolution;
  const double sigma = params.raster.sigma;
  const double half_band = e.closed() ? 0.5 * params.raster.band_width : 0.0;
  const double reach = 4.0 * sigma + half_band;
  const Aabb box = bounding_box(e.points);
  LocalRaster lr;
  lr.c0 = static_cast<long>(std::floor((box.lo.x - reach) * res));
  lr.r0 = static_cast<long>(std::floor((box.lo.y - reach) * res));
  lr.w = static_cast<long>(std::floor((box.hi.x + reach) * res)) - lr.c0 + 1;
  lr.h = static_cast<long>(std::floor((box.hi.y + reach) * res)) - lr.r0 + 1;
  lr.v.assign(static_cast<std::size_t>(lr.w * lr.h), 0.0);

  std::vector<simd::Segment> segs;
  const std::size_t n = e.points.size();
  const std::size_t edges = e.closed() && n >= 3 ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const Point2 a = e.points[i];
    const Point2 b = e.points[(i + 1) % n];
    segs.push_back(simd::make_segment(a.x, a.y, b.x, b.y));
  }
  const auto & k = simd::kernels();
  std::vector<double> xs(static_cast<std::size_t>(lr.w));
  for (long c = 0; c < lr.w; ++c) {
    xs[c] = (static_cast<double>(lr.c0 + c) + 0.5) / res;
  }
  std::vector<double> d2(xs.size());
  std::vector<std::int32_t> seg_idx(xs.size());
  std::vector<double> ts(xs.size());
  const double inv_two_s2 = 1.0 / (2.0 * sigma * sigma);
  const double cutoff = 4.0 * sigma;
  for (long r = 0; r < lr.h; ++r) {
    const double y = (static_cast<double>(lr.r0 + r) + 0.5) / res;
    std::fill(d2.begin(), d2.end(), std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      k.segment_update(xs.data(), y, xs.size(), segs[s], static_cast<std::int32_t>(s), d2.data(), seg_idx.data(), ts.data());
    }
    for (long c = 0; c < lr.w; ++c) {
      const double dd = std::max(0.0, std::sqrt(d2[c]) - half_band);
      if (dd <= cutoff) {
        const double val = std::exp(-dd * dd * inv_two_s2);
        lr.v[static_cast<std::size_t>(r * lr.w + c)] = val;
        lr.self += val * val;
      }
    }
  }
  return lr;
}

double dice_distance(const LocalRaster & a, const LocalRaster & b)
{
  const long c_lo = std::max(a.c0, b.c0);
  const long c_hi = std::min(a.c0 + a.w, b.c0 + b.w);
  const long r_lo = std::max(a.r0, b.r0);
  const long r_hi = std::min(a.r0 + a.h, b.r0 + b.h);
  double cross_sum = 0.0;
  for (long r = r_lo; r < r_hi; ++r) {
    for (long c = c_lo; c < c_hi; ++c) {
      cross_sum += a.at(r, c) * b.at(r, c);
    }
  }
  return 1.0 - (2.0 * cross_sum + kDiceEps) / (a.self + b.self + kDiceEps);
}

double o2o_from_parts(
  const MapElement & q, const MapElement & g, const LocalRaster & rq, const LocalRaster & rg, const CostParams & params)
{
  if (q.cls != g.cls) {
    return params.large_cost;
  }
  const double conf = q.confidence.value_or(1.0);
  double c = params.w_cls * (1.0 - conf);
  if (params.w_pt != 0.0) {
    c += params.w_pt * point_cost(q, g);
  }
  if (params.w_rend != 0.0) {
    c += params.w_rend * dice_distance(rq, rg);
  }
  return std::min(snap_cost(c), params.large_cost);
}

}  // namespace

double render_cost(const MapElement & a, const MapElement & b, const CostParams & params)
{
  return dice_distance(local_raster(a, params), local_raster(b, params));
}

double point_cost(const MapElement & q, const MapElement & g)
{
  return pointwise_l1(q, g).value / static_cast<double>(q.points.size());
}

double cost_o2o(const MapElement & q, const MapElement & g, const CostParams & params)
{
  if (q.cls != g.cls) {
    return params.large_cost;
  }
  return o2o_from_parts(q, g, local_raster(q, params), local_raster(g, params), params);
}

namespace
{

LocalMatch o2m_from_matrix(const CostMatrix & m, const CostParams & params)
{
  LocalMatch out;
  const Matching match = hungarian(m);
  out.label_of_segment = match.row_to_col;
  out.cost = match.total;
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (m.at(r, match.row_to_col[r]) >= params.large_cost) {
      out.cost = params.large_cost;
    }
  }
  out.cost = std::min(out.cost, params.large_cost);
  return out;
}

}  // namespace

LocalMatch cost_o2m(
  const Subsegments & s, const std::vector<MapElement> & labels, const std::vector<int> & subset, const CostParams & params)
{
  if (s.segments.size() != subset.size() || subset.empty()) {
    return {params.large_cost, {}};
  }
  CostMatrix m(subset.size(), subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    for (std::size_t j = 0; j < subset.size(); ++j) {
      m.at(k, j) = cost_o2o(s.segments[k], labels[subset[j]], params);
    }
  }
  return o2m_from_matrix(m, params);
}

std::vector<std::vector<int>> enumerate_subsets(
  const std::vector<MapElement> & labels, std::size_t max_card, double gate, std::size_t budget)
{
  require(max_card >= 1, "max_card must be at least 1");
  std::vector<Aabb> boxes;
  for (const MapElement & e : labels) {
    boxes.push_back(bounding_box(e.points));
  }
  auto compatible = [&](int a, int b) {
    return labels[a].cls == labels[b].cls && box_distance(boxes[a], boxes[b]) <= gate;
  };
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  const int n = static_cast<int>(labels.size());
  for (std::size_t k = 1; k <= max_card; ++k) {
    auto dfs = [&](auto && self, int start) -> void {
      if (current.size() == k) {
        out.push_back(current);
        if (out.size() > budget) {
          fail(ErrorCode::kBudgetExceeded, "combinatorial budget exceeded");
        }
        return;
      }
      for (int j = start; j < n; ++j) {
        bool ok = true;
        for (int c : current) {
          ok = ok && compatible(c, j);
        }
        if (ok) {
          current.push_back(j);
          self(self, j + 1);
          current.pop_back();
        }
      }
    };
    dfs(dfs, 0);
  }
  return out;
}

void AssignParams::validate() const
{
  cost.validate();
  require(L >= 2, "L must be at least 2");
  require(min_points >= 1, "min_points must be at least 1");
  require(gate >= 0.0, "gate must be non-negative");
  require(budget >= 1, "budget must be at least 1");
}

AssignmentProblem build_problem(
  const std::vector<MapElement> & predictions, const std::vector<MapElement> & labels, const BevMask & mask,
  const AssignParams & params)
{
  params.validate();
  AssignmentProblem pb;
  for (const MapElement & q : predictions) {
    pb.predictions.push_back(standardize(q, params.L));
  }
  for (const MapElement & g : labels) {
    pb.labels.push_back(standardize(g, params.L));
  }
  const std::size_t nq = pb.predictions.size();
  const std::size_t ng = pb.labels.size();
  pb.splits.resize(nq);
  std::vector<LocalRaster> label_rasters(ng);
  parallel_for(ng, [&](std::size_t j) { label_rasters[j] = local_raster(pb.labels[j], params.cost); });
  pb.o2o = CostMatrix(nq, ng, params.cost.large_cost);
  parallel_for(nq, [&](std::size_t i) {
    pb.splits[i] = split_by_mask(pb.predictions[i], mask, params.L, params.min_points);
    pb.splits[i].prediction_index = i;
    const LocalRaster rq = local_raster(pb.predictions[i], params.cost);
    for (std::size_t j = 0; j < ng; ++j) {
      if (pb.predictions[i].cls == pb.labels[j].cls) {
        pb.o2o.at(i, j) = o2o_from_parts(pb.predictions[i], pb.labels[j], rq, label_rasters[j], params.cost);
      }
    }
  });
  return pb;
}

namespace
{

struct Variable
{
  std::size_t pred = 0;
  std::vector<int> labels;
  std::vector<int> local;
  double cost = 0.0;
  bool o2o = true;
};

class BranchAndBound
{
public:
  BranchAndBound(std::vector<Variable> vars, std::size_t n_pred, std::size_t n_label)
  : vars_(std::move(vars)), pred_used_(n_pred, 0), covered_(n_label, 0), cover_(n_label)
  {
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      for (int l : vars_[v].labels) {
        cover_[l].push_back(v);
      }
    }
  }

  void set_incumbent(std::vector<std::size_t> chosen, double cost)
  {
    best_ = std::move(chosen);
    best_cost_ = cost;
    have_best_ = true;
  }

  bool run()
  {
    search(0.0);
    return have_best_;
  }

  const std::vector<std::size_t> & best() const { return best_; }
  const std::vector<Variable> & vars() const { return vars_; }

private:
  static constexpr double kSlack = 1.0 / 2097152.0;  // half the snapping grid
  static constexpr std::size_t kNodeLimit = 50'000'000;

  bool usable(std::size_t v) const
  {
    if (pred_used_[vars_[v].pred]) {
      return false;
    }
    for (int l : vars_[v].labels) {
      if (covered_[l]) {
        return false;
      }
    }
    return true;
  }

  // Lower bound on the cost of covering every open label; -1 when some
  // label has no usable variable left.
  double bound() const
  {
    double total = 0.0;
    for (std::size_t l = 0; l < covered_.size(); ++l) {
      if (covered_[l]) {
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t v : cover_[l]) {
        if (usable(v)) {
          best = std::min(best, vars_[v].cost / static_cast<double>(vars_[v].labels.size()));
        }
      }
      if (!std::isfinite(best)) {
        return -1.0;
      }
      total += best;
    }
    return total;
  }

  void search(double cost)
  {
    if (++nodes_ > kNodeLimit) {
      fail(ErrorCode::kBudgetExceeded, "assignment search budget exceeded");
    }
    std::size_t open = covered_.size();
    for (std::size_t l = 0; l < covered_.size(); ++l) {
      if (!covered_[l]) {
        open = l;
        break;
      }
    }
    if (open == covered_.size()) {
      if (!have_best_ || cost < best_cost_ - kSlack) {
        best_ = chosen_;
        best_cost_ = cost;
        have_best_ = true;
      }
      return;
    }
    const double lb = bound();
    if (lb < 0.0 || (have_best_ && cost + lb >= best_cost_ - kSlack)) {
      return;
    }
    for (std::size_t v : cover_[open]) {
      if (!usable(v)) {
        continue;
      }
      pred_used_[vars_[v].pred] = 1;
      for (int l : vars_[v].labels) {
        covered_[l] = 1;
      }
      chosen_.push_back(v);
      search(cost + vars_[v].cost);
      chosen_.pop_back();
      for (int l : vars_[v].labels) {
        covered_[l] = 0;
      }
      pred_used_[vars_[v].pred] = 0;
    }
  }

  std::vector<Variable> vars_;
  std::vector<std::uint8_t> pred_used_;
  std::vector<std::uint8_t> covered_;
  std::vector<std::vector<std::size_t>> cover_;
  std::vector<std::size_t> chosen_;
  std::vector<std::size_t> best_;
  double best_cost_ = 0.0;
  bool have_best_ = false;
  std::size_t nodes_ = 0;
};

AssignmentResult finish(std::size_t n_pred, const std::vector<Variable> & vars, const std::vector<std::size_t> & chosen)
{
  AssignmentResult out;
  out.predictions.resize(n_pred);
  for (std::size_t v : chosen) {
    const Variable & var = vars[v];
    PredictionAssignment & pa = out.predictions[var.pred];
    pa.outcome = var.o2o ? Outcome::kOneToOne : Outcome::kOneToMany;
    pa.labels = var.labels;
    pa.local = var.local;
    pa.cost = var.cost;
  }
  for (const PredictionAssignment & pa : out.predictions) {
    out.total_cost += pa.cost;
  }
  return out;
}

std::size_t effective_max_card(const AssignmentProblem & pb, const AssignParams & params)
{
  std::size_t most = 0;
  for (const Subsegments & s : pb.splits) {
    most = std::max(most, s.segments.size());
  }
  if (params.max_card > 0) {
    return params.max_card;
  }
  return std::clamp<std::size_t>(most, 1, 4);
}

}  // namespace

AssignmentResult solve_ilp(const AssignmentProblem & pb, const AssignParams & params)
{
  const std::size_t nq = pb.predictions.size();
  const std::size_t ng = pb.labels.size();
  const double large = params.cost.large_cost;
  if (nq < ng) {
    fail(ErrorCode::kInsufficientPredictions, "insufficient predictions");
  }
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < ng; ++j) {
      if (pb.o2o.at(i, j) < large) {
        vars.push_back({i, {static_cast<int>(j)}, {}, pb.o2o.at(i, j), true});
      }
    }
  }
  const std::size_t max_card = effective_max_card(pb, params);
  const std::vector<std::vector<int>> subsets = enumerate_subsets(pb.labels, max_card, params.gate, params.budget);

  // Segment-to-label costs, computed once per (prediction, segment, label).
  std::vector<std::vector<Variable>> per_pred(nq);
  parallel_for(nq, [&](std::size_t i) {
    const Subsegments & s = pb.splits[i];
    const std::size_t k = s.segments.size();
    if (k == 0) {
      return;
    }
    std::vector<LocalRaster> seg_rasters;
    for (const MapElement & seg : s.segments) {
      seg_rasters.push_back(local_raster(seg, params.cost));
    }
    std::vector<std::vector<double>> seg_cost(k, std::vector<double>(ng, large));
    std::vector<LocalRaster> label_rasters(ng);
    std::vector<std::uint8_t> have(ng, 0);
    for (const auto & subset : subsets) {
      if (subset.size() != k || pb.labels[subset[0]].cls != pb.predictions[i].cls) {
        continue;
      }
      for (int j : subset) {
        if (!have[j]) {
          have[j] = 1;
          label_rasters[j] = local_raster(pb.labels[j], params.cost);
          for (std::size_t m = 0; m < k; ++m) {
            seg_cost[m][j] = o2o_from_parts(s.segments[m], pb.labels[j], seg_rasters[m], label_rasters[j], params.cost);
          }
        }
      }
      CostMatrix mat(k, k);
      for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t j = 0; j < k; ++j) {
          mat.at(m, j) = seg_cost[m][subset[j]];
        }
      }
      const LocalMatch lm = o2m_from_matrix(mat, params.cost);
      if (lm.cost < large) {
        std::vector<int> local(k);
        for (std::size_t m = 0; m < k; ++m) {
          local[m] = subset[lm.label_of_segment[m]];
        }
        per_pred[i].push_back({i, subset, std::move(local), lm.cost, false});
      }
    }
  });
  for (auto & vs : per_pred) {
    for (auto & v : vs) {
      vars.push_back(std::move(v));
    }
  }
  std::stable_sort(vars.begin(), vars.end(), [](const Variable & a, const Variable & b) {
    if (a.cost != b.cost) {
      return a.cost < b.cost;
    }
    if (a.pred != b.pred) {
      return a.pred < b.pred;
    }
    if (a.labels != b.labels) {
      return a.labels < b.labels;
    }
    return a.o2o && !b.o2o;
  });

  BranchAndBound bb(std::move(vars), nq, ng);
  // Incumbent from the one-to-one Hungarian solution when it is feasible.
  if (ng > 0) {
    const Matching m = hungarian(pb.o2o);
    std::vector<int> label_to_pred(ng, -1);
    bool feasible = true;
    for (std::size_t i = 0; i < nq; ++i) {
      if (m.row_to_col[i] >= 0) {
        label_to_pred[m.row_to_col[i]] = static_cast<int>(i);
        feasible = feasible && pb.o2o.at(i, m.row_to_col[i]) < large;
      }
    }
    if (feasible) {
      std::vector<std::size_t> chosen;
      double cost = 0.0;
      for (std::size_t v = 0; v < bb.vars().size(); ++v) {
        const Variable & var = bb.vars()[v];
        if (var.o2o && label_to_pred[var.labels[0]] == static_cast<int>(var.pred)) {
          chosen.push_back(v);
          cost += var.cost;
        }
      }
      bb.set_incumbent(std::move(chosen), cost);
    }
  }
  if (!bb.run()) {
    fail(ErrorCode::kInsufficientPredictions, "insufficient predictions");
  }
  return finish(nq, bb.vars(), bb.best());
}

AssignmentResult solve_padded_hungarian(const AssignmentProblem & pb, const AssignParams & params)
{
  const std::size_t nq = pb.predictions.size();
  const std::size_t ng = pb.labels.size();
  const double large = params.cost.large_cost;
  if (nq < ng) {
    fail(ErrorCode::kInsufficientPredictions, "insufficient predictions");
  }
  for (const Subsegments & s : pb.splits) {
    require(s.segments.size() <= 1, "the Hungarian fast path needs at most one subsegment per prediction");
  }
  // Entry = cheaper of one-to-one and the single-segment one-to-many cost.
  CostMatrix o2m(nq, ng, large);
  parallel_for(nq, [&](std::size_t i) {
    if (pb.splits[i].segments.size() != 1) {
      return;
    }
    const MapElement & seg = pb.splits[i].segments[0];
    const LocalRaster rs = local_raster(seg, params.cost);
    for (std::size_t j = 0; j < ng; ++j) {
      if (seg.cls == pb.labels[j].cls) {
        o2m.at(i, j) = o2o_from_parts(seg, pb.labels[j], rs, local_raster(pb.labels[j], params.cost), params.cost);
      }
    }
  });
  CostMatrix padded(nq, nq, 0.0);
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < ng; ++j) {
      padded.at(i, j) = std::min(pb.o2o.at(i, j), o2m.at(i, j));
    }
  }
  const Matching m = hungarian(padded);
  AssignmentResult out;
  out.predictions.resize(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    const int j = m.row_to_col[i];
    if (j < 0 || static_cast<std::size_t>(j) >= ng) {
      continue;
    }
    if (padded.at(i, j) >= large) {
      fail(ErrorCode::kInsufficientPredictions, "insufficient predictions");
    }
    PredictionAssignment & pa = out.predictions[i];
    pa.labels = {j};
    if (pb.o2o.at(i, j) <= o2m.at(i, j)) {
      pa.outcome = Outcome::kOneToOne;
      pa.cost = pb.o2o.at(i, j);
    } else {
      pa.outcome = Outcome::kOneToMany;
      pa.local = {j};
      pa.cost = o2m.at(i, j);
    }
  }
  for (const PredictionAssignment & pa : out.predictions) {
    out.total_cost += pa.cost;
  }
  return out;
}

AssignmentResult solve_global(
  const std::vector<MapElement> & predictions, const std::vector<MapElement> & labels, const BevMask & mask,
  const AssignParams & params)
{
  if (predictions.size() < labels.size()) {
    fail(ErrorCode::kInsufficientPredictions, "insufficient predictions");
  }
  const AssignmentProblem pb = build_problem(predictions, labels, mask, params);
  bool single = true;
  for (const Subsegments & s : pb.splits) {
    single = single && s.segments.size() <= 1;
  }
  switch (params.mode) {
    case SolveMode::kIlp:
      return solve_ilp(pb, params);
    case SolveMode::kHungarian:
      return solve_padded_hungarian(pb, params);
    case SolveMode::kAuto:
      break;
  }
  return single ? solve_padded_hungarian(pb, params) : solve_ilp(pb, params);
}

void check_assignment(const AssignmentResult & result, std::size_t n_labels)
{
  std::vector<int> seen(n_labels, 0);
  for (const PredictionAssignment & pa : result.predictions) {
    require((pa.outcome == Outcome::kUnassigned) == pa.labels.empty(), "assignment outcome and labels disagree");
    for (int l : pa.labels) {
      require(l >= 0 && static_cast<std::size_t>(l) < n_labels, "assignment label out of range");
      ++seen[l];
    }
  }
  for (int s : seen) {
    require(s == 1, "every label must be assigned exactly once");
  }
}

}  // namespace pseudomap
