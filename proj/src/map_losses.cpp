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

#include "pseudomap/map_losses.hpp"

#include "pseudomap/error.hpp"
#include "pseudomap/parallel.hpp"

namespace pseudomap
{

void LossParams::validate() const
{
  weights.validate();
  require(focal_alpha >= 0.0 && focal_gamma >= 0.0, "focal alpha and gamma must be non-negative");
  raster.validate();
}

std::vector<double> class_probabilities(const MapElement & q)
{
  const double conf = q.confidence.value_or(1.0);
  std::vector<double> p(kNumMapClasses + 1, (1.0 - conf) / static_cast<double>(kNumMapClasses));
  p[static_cast<int>(q.cls)] = conf;
  return p;
}

std::vector<bool> active_predictions(const AssignmentResult & assignment, const std::vector<Subsegments> & splits)
{
  std::vector<bool> active(assignment.predictions.size(), false);
  for (std::size_t i = 0; i < active.size(); ++i) {
    active[i] = assignment.predictions[i].outcome == Outcome::kOneToOne ||
      (i < splits.size() && !splits[i].segments.empty());
  }
  return active;
}

LossBreakdown compute_map_losses(
  const std::vector<MapElement> & predictions, const std::vector<MapElement> & labels, const BevMask & mask,
  const AssignmentResult & assignment, const LossParams & params, std::size_t L, const std::optional<BevSegInput> & bev)
{
  params.validate();
  require(assignment.predictions.size() == predictions.size(), "assignment does not match the predictions");
  check_assignment(assignment, labels.size());
  const std::size_t nq = predictions.size();
  std::vector<MapElement> q(nq);
  std::vector<MapElement> g(labels.size());
  std::vector<Subsegments> splits(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    q[i] = standardize(predictions[i], L);
    splits[i] = split_by_mask(q[i], mask, L);
  }
  for (std::size_t j = 0; j < labels.size(); ++j) {
    g[j] = standardize(labels[j], L);
  }
  const std::vector<bool> active = active_predictions(assignment, splits);

  std::array<LossPart, kNumLossTerms> parts;
  for (LossPart & part : parts) {
    part.grad_points.assign(nq, std::vector<Point2>(L));
    part.grad_class.assign(nq, std::vector<double>(kNumMapClasses + 1, 0.0));
  }
  LossPart & cls = parts[static_cast<int>(LossTerm::kCls)];
  LossPart & pt = parts[static_cast<int>(LossTerm::kPt)];
  LossPart & rend = parts[static_cast<int>(LossTerm::kRend)];
  LossPart & dir = parts[static_cast<int>(LossTerm::kDir)];

  // Per-prediction terms computed independently, summed in index order.
  std::vector<double> rend_value(nq, 0.0);
  std::vector<double> dir_value(nq, 0.0);
  std::vector<std::vector<Point2>> rend_grad(nq);
  std::vector<std::vector<Point2>> dir_grad(nq);
  std::size_t n_assigned = 0;
  for (std::size_t i = 0; i < nq; ++i) {
    n_assigned += active[i] && assignment.predictions[i].outcome != Outcome::kUnassigned ? 1 : 0;
  }
  parallel_for(nq, [&](std::size_t i) {
    const PredictionAssignment & pa = assignment.predictions[i];
    if (!active[i] || pa.outcome == Outcome::kUnassigned) {
      return;
    }
    std::vector<MapElement> assigned;
    for (int j : pa.labels) {
      assigned.push_back(g[j]);
    }
    const PointGrad r = render_loss(q[i], assigned, mask, params.raster);
    rend_value[i] = r.value;
    rend_grad[i] = r.grad;
    if (params.direction == DirectionLossKind::kTurningAngle && q[i].points.size() >= 3) {
      const PointGrad d = direction_loss(q[i]);
      dir_value[i] = d.value;
      dir_grad[i] = d.grad;
    }
  });

  const double inv_assigned = n_assigned > 0 ? 1.0 / static_cast<double>(n_assigned) : 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    if (!active[i]) {
      continue;
    }
    const PredictionAssignment & pa = assignment.predictions[i];
    const int target = pa.outcome == Outcome::kUnassigned ? kBackgroundClass : static_cast<int>(g[pa.labels[0]].cls);
    const ScalarGrad f = focal_loss(class_probabilities(q[i]), target, params.focal_alpha, params.focal_gamma);
    cls.value += f.value;
    cls.grad_class[i] = f.grad;
    if (pa.outcome == Outcome::kOneToOne) {
      const L1Result l1 = pointwise_l1(q[i], g[pa.labels[0]]);
      pt.value += l1.value;
      pt.grad_points[i] = l1.grad;
    }
    if (pa.outcome != Outcome::kUnassigned) {
      rend.value += rend_value[i] * inv_assigned;
      dir.value += dir_value[i] * inv_assigned;
      for (std::size_t l = 0; l < L; ++l) {
        rend.grad_points[i][l] = inv_assigned * rend_grad[i][l];
        if (!dir_grad[i].empty()) {
          dir.grad_points[i][l] = inv_assigned * dir_grad[i][l];
        }
      }
    }
  }
  if (bev) {
    parts[static_cast<int>(LossTerm::kBevSeg)].value = masked_bev_seg_loss(bev->pred, bev->label, mask);
  }
  return total_loss(parts, params.weights);
}

}  // namespace pseudomap
