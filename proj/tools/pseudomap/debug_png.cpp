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

#include "debug_png.hpp"

#include <png.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

#include "pseudomap/error.hpp"

namespace pseudomap::cli
{

namespace
{

using Rgb = std::array<std::uint8_t, 3>;

constexpr std::array<Rgb, kNumRasterClasses> kPalette = {{
  {0, 0, 0},        // unobserved
  {90, 90, 90},     // road
  {60, 130, 60},    // outside
  {240, 240, 240},  // lane marking
  {230, 200, 40},   // ped crossing
}};

Rgb element_color(MapClass cls)
{
  switch (cls) {
    case MapClass::kPedCrossing: return {220, 40, 220};
    case MapClass::kDivider: return {230, 120, 20};
    case MapClass::kBoundary: return {30, 120, 240};
  }
  return {255, 0, 0};
}

class Canvas
{
public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h) {}

  void put(int r, int c, Rgb color)
  {
    if (r >= 0 && c >= 0 && r < h_ && c < w_) {
      px_[static_cast<std::size_t>(r) * w_ + c] = color;
    }
  }
  Rgb get(int r, int c) const { return px_[static_cast<std::size_t>(r) * w_ + c]; }

  void line(double r0, double c0, double r1, double c1, Rgb color)
  {
    const int steps = static_cast<int>(std::ceil(std::max(std::abs(r1 - r0), std::abs(c1 - c0)))) + 1;
    for (int k = 0; k <= steps; ++k) {
      const double f = static_cast<double>(k) / steps;
      const int r = static_cast<int>(std::floor(r0 + f * (r1 - r0)));
      const int c = static_cast<int>(std::floor(c0 + f * (c1 - c0)));
      put(r, c, color);
      put(r + 1, c, color);
      put(r, c + 1, color);
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }

private:
  int w_;
  int h_;
  std::vector<Rgb> px_;
};

struct FileCloser
{
  void operator()(std::FILE * f) const { std::fclose(f); }
};

}  // namespace

void write_debug_png(
  const std::string & path, const SemanticRaster & raster, const BevMask * mask, const VectorMap * overlay)
{
  Canvas canvas(raster.width, raster.height);
  for (int r = 0; r < raster.height; ++r) {
    for (int c = 0; c < raster.width; ++c) {
      Rgb color = kPalette[static_cast<int>(raster.at(r, c))];
      if (mask && !mask->grid.at(r, c)) {
        for (auto & ch : color) {
          ch = static_cast<std::uint8_t>(ch / 3);
        }
      }
      canvas.put(r, c, color);
    }
  }
  if (overlay) {
    const BevSpec & spec = raster.spec;
    for (const MapElement & e : overlay->elements) {
      const std::size_t n = e.points.size();
      const std::size_t edges = e.closed() ? n : n - 1;
      for (std::size_t i = 0; i < edges; ++i) {
        const Point2 a = e.points[i];
        const Point2 b = e.points[(i + 1) % n];
        canvas.line((spec.y_max - a.y) * spec.resolution, (a.x - spec.x_min) * spec.resolution,
          (spec.y_max - b.y) * spec.resolution, (b.x - spec.x_min) * spec.resolution, element_color(e.cls));
      }
    }
  }

  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    fail(ErrorCode::kIo, path + ": cannot create file");
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, path + ": libpng initialization failed");
  }
  std::vector<png_byte> row(static_cast<std::size_t>(canvas.width()) * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, path + ": PNG encoding failed");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, canvas.width(), canvas.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
    PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < canvas.height(); ++r) {
    for (int c = 0; c < canvas.width(); ++c) {
      const Rgb px = canvas.get(r, c);
      std::copy(px.begin(), px.end(), row.begin() + 3 * c);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace pseudomap::cli
