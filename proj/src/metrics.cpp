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

#include "pseudomap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pseudomap/error.hpp"
#include "pseudomap/parallel.hpp"

namespace pseudomap
{

void ApConfig::validate() const
{
  require(!thresholds.empty(), "at least one AP threshold is required");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    require(thresholds[i] > 0.0, "AP thresholds must be positive");
    require(i == 0 || thresholds[i] > thresholds[i - 1], "AP thresholds must be strictly increasing");
  }
  require(n_samples >= 2, "n_samples must be at least 2");
}

double average_precision(const std::vector<bool> & tp, std::size_t n_gt)
{
  if (n_gt == 0) {
    return tp.empty() ? 1.0 : 0.0;
  }
  const std::size_t n = tp.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    hits += tp[k] ? 1 : 0;
    precision[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(hits) / static_cast<double>(n_gt);
  }
  // Precision envelope from the right, then area over recall steps.
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (recall[k] > prev_recall) {
      ap += (recall[k] - prev_recall) * precision[k];
      prev_recall = recall[k];
    }
  }
  return ap;
}

namespace
{

struct RankedPred
{
  double confidence;
  std::size_t frame;
  std::size_t element;
};

}  // namespace

EvalReport chamfer_ap(const std::vector<VectorMap> & preds, const std::vector<VectorMap> & gts, const ApConfig & cfg)
{
  cfg.validate();
  require(preds.size() == gts.size(), "prediction and ground-truth frame counts differ");
  const std::size_t nf = preds.size();
  const std::size_t nt = cfg.thresholds.size();

  // Chamfer distance of every same-class (pred, gt) pair, per frame.
  std::vector<std::vector<double>> dist(nf);
  parallel_for(nf, [&](std::size_t f) {
    const auto & pe = preds[f].elements;
    const auto & ge = gts[f].elements;
    dist[f].assign(pe.size() * ge.size(), std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < pe.size(); ++p) {
      for (std::size_t g = 0; g < ge.size(); ++g) {
        if (pe[p].cls == ge[g].cls && pe[p].kind == ge[g].kind) {
          dist[f][p * ge.size() + g] = chamfer_distance(pe[p], ge[g], cfg.n_samples);
        }
      }
    }
  });

  EvalReport report;
  report.thresholds = cfg.thresholds;
  for (MapClass cls : kAllMapClasses) {
    ClassReport & cr = report.classes[static_cast<int>(cls)];
    std::vector<RankedPred> ranked;
    for (std::size_t f = 0; f < nf; ++f) {
      for (std::size_t p = 0; p < preds[f].elements.size(); ++p) {
        const MapElement & e = preds[f].elements[p];
        if (e.cls == cls) {
          ranked.push_back({e.confidence.value_or(1.0), f, p});
        }
      }
      for (const MapElement & e : gts[f].elements) {
        cr.n_gt += e.cls == cls ? 1 : 0;
      }
    }
    cr.n_pred = ranked.size();
    std::stable_sort(ranked.begin(), ranked.end(),
      [](const RankedPred & a, const RankedPred & b) { return a.confidence > b.confidence; });
    for (std::size_t t = 0; t < nt; ++t) {
      const double tau = cfg.thresholds[t];
      std::vector<std::vector<std::uint8_t>> claimed(nf);
      for (std::size_t f = 0; f < nf; ++f) {
        claimed[f].assign(gts[f].elements.size(), 0);
      }
      std::vector<bool> flags;
      std::size_t tp = 0;
      for (const RankedPred & rp : ranked) {
        const auto & ge = gts[rp.frame].elements;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_g = 0;
        for (std::size_t g = 0; g < ge.size(); ++g) {
          const double d = dist[rp.frame][rp.element * ge.size() + g];
          if (ge[g].cls == cls && !claimed[rp.frame][g] && d < best) {
            best = d;
            best_g = g;
          }
        }
        const bool hit = best < tau;
        if (hit) {
          claimed[rp.frame][best_g] = 1;
          ++tp;
        }
        flags.push_back(hit);
      }
      cr.ap.push_back(average_precision(flags, cr.n_gt));
      cr.tp.push_back(tp);
      cr.fp.push_back(ranked.size() - tp);
      cr.fn.push_back(cr.n_gt - tp);
    }
    double sum = 0.0;
    for (double a : cr.ap) {
      sum += a;
    }
    cr.mean_ap = sum / static_cast<double>(nt);
  }
  double sum = 0.0;
  for (const ClassReport & cr : report.classes) {
    sum += cr.mean_ap;
  }
  report.mean_ap = sum / static_cast<double>(kNumMapClasses);
  return report;
}

double coverage_ratio(const BevMask & mask)
{
  const std::size_t total = mask.grid.bits.size();
  if (total == 0) {
    return 0.0;
  }
  return static_cast<double>(mask.grid.count()) / static_cast<double>(total);
}

std::vector<double> coverage_curve(const std::vector<BevMask> & masks, const std::vector<double> & taus)
{
  for (double tau : taus) {
    require(tau >= 0.0 && tau <= 1.0, "coverage thresholds must lie in [0, 1]");
  }
  std::vector<double> ratios;
  for (const BevMask & m : masks) {
    ratios.push_back(coverage_ratio(m));
  }
  std::vector<double> curve;
  for (double tau : taus) {
    std::size_t above = 0;
    for (double r : ratios) {
      above += r > tau ? 1 : 0;
    }
    curve.push_back(masks.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(masks.size()));
  }
  return curve;
}

namespace
{

double signed_area(const std::vector<Point2> & ring)
{
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    a += cross(ring[i], ring[(i + 1) % ring.size()]);
  }
  return 0.5 * a;
}

}  // namespace

VectorMap mask_gt(const VectorMap & gts, const BevMask & mask, std::size_t L, std::size_t min_points)
{
  VectorMap out;
  out.frame = gts.frame;
  out.bev_range = gts.bev_range;
  for (const MapElement & e : gts.elements) {
    for (ObservedRun & run : observed_runs(e, mask, L, min_points)) {
      MapElement part = e;
      if (run.whole_ring || !e.closed()) {
        part.points = std::move(run.points);
        out.elements.push_back(std::move(part));
        continue;
      }
      if (run.points.size() >= 3 && signed_area(run.points) != 0.0) {
        part.points = std::move(run.points);
        out.elements.push_back(std::move(part));
      }
    }
  }
  return out;
}

}  // namespace pseudomap
