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

#include "pseudomap/raster_post.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "pseudomap/error.hpp"
#include "pseudomap/simd/kernels.hpp"

namespace pseudomap
{
namespace
{

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

struct DisjointSet
{
  std::vector<std::int32_t> parent;

  std::int32_t make()
  {
    parent.push_back(static_cast<std::int32_t>(parent.size()));
    return parent.back();
  }
  std::int32_t find(std::int32_t x)
  {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

}  // namespace

Components connected_components(const BinaryGrid & grid)
{
  // Two-pass sequential labeling with union-find over provisional labels.
  Components out;
  out.width = grid.width;
  out.height = grid.height;
  out.labels.assign(grid.bits.size(), 0);
  DisjointSet sets;
  sets.make();  // provisional label 0 is background
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (!grid.at(r, c)) {
        continue;
      }
      std::int32_t current = 0;
      // Already-visited neighbors: W, NW, N, NE.
      const int nr[4] = {r, r - 1, r - 1, r - 1};
      const int nc[4] = {c - 1, c - 1, c, c + 1};
      for (int k = 0; k < 4; ++k) {
        if (!grid.in_bounds(nr[k], nc[k]) || !grid.at(nr[k], nc[k])) {
          continue;
        }
        const std::int32_t l = out.labels[static_cast<std::size_t>(nr[k]) * grid.width + nc[k]];
        if (current == 0) {
          current = l;
        } else {
          sets.unite(current, l);
        }
      }
      if (current == 0) {
        current = sets.make();
      }
      out.labels[static_cast<std::size_t>(r) * grid.width + c] = current;
    }
  }
  std::vector<std::int32_t> final_label(sets.parent.size(), 0);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (out.labels[i] == 0) {
      continue;
    }
    const std::int32_t root = sets.find(out.labels[i]);
    if (final_label[root] == 0) {
      out.areas.push_back(0);
      final_label[root] = static_cast<std::int32_t>(out.areas.size());
    }
    out.labels[i] = final_label[root];
    ++out.areas[out.labels[i] - 1];
  }
  return out;
}

Components connected_components(const SemanticRaster & raster, RasterClass cls)
{
  return connected_components(class_mask(raster, cls));
}

namespace
{

// Chessboard distance to the nearest pixel outside `grid` (outside the
// image counts as outside).
std::vector<int> chessboard_distance(const BinaryGrid & grid)
{
  const int w = grid.width;
  const int h = grid.height;
  const int inf = w + h + 2;
  std::vector<int> d(static_cast<std::size_t>(w) * h, 0);
  auto at = [&](int r, int c) -> int {
    if (r < 0 || c < 0 || r >= h || c >= w) {
      return 0;
    }
    return d[static_cast<std::size_t>(r) * w + c];
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!grid.at(r, c)) {
        continue;
      }
      int v = inf;
      v = std::min({v, at(r - 1, c - 1) + 1, at(r - 1, c) + 1, at(r - 1, c + 1) + 1, at(r, c - 1) + 1});
      d[static_cast<std::size_t>(r) * w + c] = v;
    }
  }
  for (int r = h - 1; r >= 0; --r) {
    for (int c = w - 1; c >= 0; --c) {
      if (!grid.at(r, c)) {
        continue;
      }
      int v = d[static_cast<std::size_t>(r) * w + c];
      v = std::min({v, at(r + 1, c + 1) + 1, at(r + 1, c) + 1, at(r + 1, c - 1) + 1, at(r, c + 1) + 1});
      d[static_cast<std::size_t>(r) * w + c] = v;
    }
  }
  return d;
}

}  // namespace

SemanticRaster remove_artifacts(const SemanticRaster & raster, const ArtifactParams & params)
{
  require(params.min_area >= 0 && params.thick_max >= 1, "invalid artifact parameters");
  SemanticRaster out = raster;
  const int w = raster.width;
  const int h = raster.height;
  std::vector<std::int32_t> stamp(static_cast<std::size_t>(w) * h, -1);
  std::int32_t stamp_id = 0;

  // Decisions are taken on the input raster and applied together.
  for (RasterClass cls : {RasterClass::kRoad, RasterClass::kOutside, RasterClass::kLaneMarking, RasterClass::kPedCrossing}) {
    const Components comps = connected_components(raster, cls);
    if (comps.count() == 0) {
      continue;
    }
    std::vector<std::vector<std::size_t>> members(comps.count());
    for (std::size_t i = 0; i < comps.labels.size(); ++i) {
      const std::int32_t l = comps.labels[i];
      if (l > 0 && comps.areas[l - 1] < params.min_area) {
        members[l - 1].push_back(i);
      }
    }
    for (int l = 0; l < comps.count(); ++l) {
      if (members[l].empty()) {
        continue;
      }
      std::array<int, kNumRasterClasses> adjacent{};
      ++stamp_id;
      for (std::size_t idx : members[l]) {
        const int r = static_cast<int>(idx / w);
        const int c = static_cast<int>(idx % w);
        for (int k = 0; k < 8; ++k) {
          const int rr = r + kDr[k];
          const int cc = c + kDc[k];
          if (!raster.in_bounds(rr, cc)) {
            continue;
          }
          const std::size_t nidx = static_cast<std::size_t>(rr) * w + cc;
          if (comps.labels[nidx] == l + 1 || stamp[nidx] == stamp_id) {
            continue;
          }
          stamp[nidx] = stamp_id;
          ++adjacent[raster.classes[nidx]];
        }
      }
      int best = -1;
      int best_count = 0;
      bool tie = false;
      for (int k = 0; k < kNumRasterClasses; ++k) {
        if (adjacent[k] > best_count) {
          best = k;
          best_count = adjacent[k];
          tie = false;
        } else if (adjacent[k] > 0 && adjacent[k] == best_count) {
          tie = true;
        }
      }
      if (best < 0) {
        continue;  // nothing adjacent: the component is the whole raster
      }
      const auto target = static_cast<std::uint8_t>(tie ? RasterClass::kUnobserved : static_cast<RasterClass>(best));
      for (std::size_t idx : members[l]) {
        out.classes[idx] = target;
      }
    }
  }

  const BinaryGrid lanes = class_mask(out, RasterClass::kLaneMarking);
  const Components lane_comps = connected_components(lanes);
  if (lane_comps.count() > 0) {
    const std::vector<int> depth = chessboard_distance(lanes);
    std::vector<int> max_depth(lane_comps.count(), 0);
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if (lane_comps.labels[i] > 0) {
        max_depth[lane_comps.labels[i] - 1] = std::max(max_depth[lane_comps.labels[i] - 1], depth[i]);
      }
    }
    for (std::size_t i = 0; i < depth.size(); ++i) {
      const std::int32_t l = lane_comps.labels[i];
      if (l > 0 && 2 * max_depth[l - 1] - 1 > params.thick_max) {
        out.classes[i] = static_cast<std::uint8_t>(RasterClass::kRoad);
      }
    }
  }
  return out;
}

namespace
{

BinaryGrid dilate(const BinaryGrid & in, const std::vector<std::pair<int, int>> & offsets)
{
  const auto & k = simd::kernels();
  BinaryGrid out(in.width, in.height, 0);
  const int w = in.width;
  for (const auto & [dy, dx] : offsets) {
    const int c_lo = std::max(0, dx);
    const int c_hi = std::min(w, w + dx);
    if (c_hi <= c_lo) {
      continue;
    }
    for (int r = 0; r < in.height; ++r) {
      const int sr = r - dy;
      if (sr < 0 || sr >= in.height) {
        continue;
      }
      k.or_into(&out.at(r, c_lo), in.bits.data() + static_cast<std::size_t>(sr) * w + (c_lo - dx), static_cast<std::size_t>(c_hi - c_lo));
    }
  }
  return out;
}

BinaryGrid erode(const BinaryGrid & in, const std::vector<std::pair<int, int>> & offsets)
{
  const auto & k = simd::kernels();
  BinaryGrid out = in;
  const int w = in.width;
  for (const auto & [dy, dx] : offsets) {
    const int c_lo = std::max(0, -dx);
    const int c_hi = std::min(w, w - dx);
    for (int r = 0; r < in.height; ++r) {
      const int sr = r + dy;
      std::uint8_t * row = &out.at(r, 0);
      if (sr < 0 || sr >= in.height || c_hi <= c_lo) {
        std::fill(row, row + w, 0);
        continue;
      }
      std::fill(row, row + c_lo, 0);
      std::fill(row + c_hi, row + w, 0);
      k.and_into(row + c_lo, in.bits.data() + static_cast<std::size_t>(sr) * w + (c_lo + dx), static_cast<std::size_t>(c_hi - c_lo));
    }
  }
  return out;
}

}  // namespace

BinaryGrid morphology(const BinaryGrid & grid, const StructuringElement & element, MorphMode mode)
{
  const auto offsets = element.offsets();
  switch (mode) {
    case MorphMode::kDilate:
      return dilate(grid, offsets);
    case MorphMode::kErode:
      return erode(grid, offsets);
    case MorphMode::kOpen:
      return dilate(erode(grid, offsets), offsets);
    case MorphMode::kClose:
      return erode(dilate(grid, offsets), offsets);
  }
  return grid;
}

BinaryGrid extract_boundary(const SemanticRaster & raster, const StructuringElement & smoothing)
{
  BinaryGrid outside = class_mask(raster, RasterClass::kOutside);
  outside = morphology(outside, smoothing, MorphMode::kOpen);
  outside = morphology(outside, smoothing, MorphMode::kClose);
  const BinaryGrid near_outside = morphology(outside, {StructuringElement::Shape::kSquare, 3}, MorphMode::kDilate);
  BinaryGrid out(raster.width, raster.height, 0);
  const auto road = static_cast<std::uint8_t>(RasterClass::kRoad);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    out.bits[i] = (raster.classes[i] == road && !outside.bits[i] && near_outside.bits[i]) ? 1 : 0;
  }
  return out;
}

BinaryGrid connect_lane_fragments(
  const BinaryGrid & lanes, const SemanticRaster & raster, const StructuringElement & element)
{
  require(lanes.width == raster.width && lanes.height == raster.height, "lane grid does not match raster");
  const BinaryGrid grown = morphology(lanes, element, MorphMode::kDilate);
  BinaryGrid out = lanes;
  const auto road = static_cast<std::uint8_t>(RasterClass::kRoad);
  const auto lane = static_cast<std::uint8_t>(RasterClass::kLaneMarking);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    if (grown.bits[i] && (raster.classes[i] == road || raster.classes[i] == lane)) {
      out.bits[i] = 1;
    }
  }
  return out;
}

namespace
{

// Neighbours P2..P9 clockwise from north.
constexpr int kZr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kZc[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Protects one pixel of every component whose pixels are all marked.
void protect_components(const BinaryGrid & grid, BinaryGrid & marked, const std::vector<std::size_t> & marked_list)
{
  const int w = grid.width;
  BinaryGrid only_marked(grid.width, grid.height, 0);
  for (std::size_t idx : marked_list) {
    only_marked.bits[idx] = 1;
  }
  const Components comps = connected_components(only_marked);
  std::vector<std::uint8_t> touches_survivor(comps.count(), 0);
  std::vector<std::size_t> first(comps.count(), static_cast<std::size_t>(-1));
  for (std::size_t idx : marked_list) {
    const int l = comps.labels[idx] - 1;
    first[l] = std::min(first[l], idx);
    if (touches_survivor[l]) {
      continue;
    }
    const int r = static_cast<int>(idx / w);
    const int c = static_cast<int>(idx % w);
    for (int k = 0; k < 8; ++k) {
      const int rr = r + kDr[k];
      const int cc = c + kDc[k];
      if (grid.get(rr, cc) && !marked.at(rr, cc)) {
        touches_survivor[l] = 1;
        break;
      }
    }
  }
  for (int l = 0; l < comps.count(); ++l) {
    if (!touches_survivor[l]) {
      marked.bits[first[l]] = 0;
    }
  }
}

bool zhang_suen_pass(BinaryGrid & grid, int step)
{
  BinaryGrid marked(grid.width, grid.height, 0);
  std::vector<std::size_t> marked_list;
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (!grid.at(r, c)) {
        continue;
      }
      int p[8];
      int b = 0;
      for (int k = 0; k < 8; ++k) {
        p[k] = grid.get(r + kZr[k], c + kZc[k]);
        b += p[k];
      }
      if (b < 2 || b > 6) {
        continue;
      }
      int a = 0;
      for (int k = 0; k < 8; ++k) {
        a += (p[k] == 0 && p[(k + 1) % 8] == 1) ? 1 : 0;
      }
      if (a != 1) {
        continue;
      }
      // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
      const bool ok = step == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
      if (ok) {
        marked.at(r, c) = 1;
        marked_list.push_back(static_cast<std::size_t>(r) * grid.width + c);
      }
    }
  }
  if (marked_list.empty()) {
    return false;
  }
  protect_components(grid, marked, marked_list);
  bool changed = false;
  for (std::size_t idx : marked_list) {
    if (marked.bits[idx]) {
      grid.bits[idx] = 0;
      changed = true;
    }
  }
  return changed;
}

// True when the foreground 8-neighbours of (r, c) form one 8-connected group
// among themselves.
bool neighbours_single_group(const BinaryGrid & grid, int r, int c, int & count)
{
  int ring_r[8];
  int ring_c[8];
  count = 0;
  for (int k = 0; k < 8; ++k) {
    if (grid.get(r + kZr[k], c + kZc[k])) {
      ring_r[count] = kZr[k];
      ring_c[count] = kZc[k];
      ++count;
    }
  }
  if (count == 0) {
    return false;
  }
  int group[8];
  std::iota(group, group + count, 0);
  auto find = [&](int x) {
    while (group[x] != x) {
      x = group[x];
    }
    return x;
  };
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (std::abs(ring_r[i] - ring_r[j]) <= 1 && std::abs(ring_c[i] - ring_c[j]) <= 1) {
        group[find(j)] = find(i);
      }
    }
  }
  const int root = find(0);
  for (int i = 1; i < count; ++i) {
    if (find(i) != root) {
      return false;
    }
  }
  return true;
}

// True when the background cells of the 8-ring that are 4-adjacent to
// (r, c) all belong to one 4-connected group within the ring, so that
// deleting (r, c) neither opens a hole nor joins two background regions.
bool background_touches_once(const BinaryGrid & grid, int r, int c)
{
  int ring_r[8];
  int ring_c[8];
  int n = 0;
  for (int k = 0; k < 8; ++k) {
    if (!grid.get(r + kZr[k], c + kZc[k])) {
      ring_r[n] = kZr[k];
      ring_c[n] = kZc[k];
      ++n;
    }
  }
  int group[8];
  std::iota(group, group + n, 0);
  auto find = [&](int x) {
    while (group[x] != x) {
      x = group[x];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(ring_r[i] - ring_r[j]) + std::abs(ring_c[i] - ring_c[j]) == 1) {
        group[find(j)] = find(i);
      }
    }
  }
  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (ring_r[i] != 0 && ring_c[i] != 0) {
      continue;  // diagonal cells do not touch the center
    }
    if (root < 0) {
      root = find(i);
    } else if (find(i) != root) {
      return false;
    }
  }
  return root >= 0;
}

void remove_staircases(BinaryGrid & grid)
{
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (!grid.at(r, c)) {
        continue;
      }
      const bool n = grid.get(r - 1, c);
      const bool e = grid.get(r, c + 1);
      const bool s = grid.get(r + 1, c);
      const bool west = grid.get(r, c - 1);
      if (!((n && e) || (e && s) || (s && west) || (west && n))) {
        continue;
      }
      int count = 0;
      if (neighbours_single_group(grid, r, c, count) && count >= 2 && count <= 4 &&
          background_touches_once(grid, r, c)) {
        grid.at(r, c) = 0;
      }
    }
  }
}

}  // namespace

BinaryGrid skeletonize(const BinaryGrid & grid)
{
  BinaryGrid out = grid;
  for (auto & b : out.bits) {
    b = b ? 1 : 0;
  }
  while (true) {
    const bool a = zhang_suen_pass(out, 0);
    const bool b = zhang_suen_pass(out, 1);
    if (!a && !b) {
      break;
    }
  }
  remove_staircases(out);
  return out;
}

SemanticRaster extend_margin(const SemanticRaster & raster, int margin_px)
{
  require(margin_px >= 0, "margin must be non-negative");
  const double m = margin_px / raster.spec.resolution;
  SemanticRaster out(raster.spec.expanded(m), RasterClass::kUnobserved);
  require(out.width == raster.width + 2 * margin_px && out.height == raster.height + 2 * margin_px,
    "margin does not map to whole pixels");
  for (int r = 0; r < out.height; ++r) {
    const int sr = std::clamp(r - margin_px, 0, raster.height - 1);
    for (int c = 0; c < out.width; ++c) {
      const int sc = std::clamp(c - margin_px, 0, raster.width - 1);
      out.set(r, c, raster.at(sr, sc));
    }
  }
  return out;
}

SemanticRaster crop_margin(const SemanticRaster & raster, int margin_px, const BevSpec & inner)
{
  SemanticRaster out(inner, RasterClass::kUnobserved);
  require(out.width + 2 * margin_px == raster.width && out.height + 2 * margin_px == raster.height,
    "crop does not match the margin");
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      out.set(r, c, raster.at(r + margin_px, c + margin_px));
    }
  }
  return out;
}

}  // namespace pseudomap
