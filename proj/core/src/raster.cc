// Copyright 2026 The Tidy Authors.
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

#include "tidy/raster.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "tidy/error.h"

namespace tidy {
namespace {

constexpr double kCellSlack = 1e-9;

// Deterministic per-category fill colors, indexed by canonical category.
constexpr std::array<std::array<unsigned char, 3>, kMaxCategories> kPalette = {{
    {230, 25, 75},   {60, 180, 75},   {0, 130, 200},   {245, 130, 48},
    {145, 30, 180},  {70, 240, 240},  {240, 50, 230},  {210, 245, 60},
    {250, 190, 212}, {0, 128, 128},   {220, 190, 255}, {170, 110, 40},
    {255, 250, 200}, {128, 0, 0},     {170, 255, 195}, {128, 128, 0},
}};

int category_index(const std::vector<std::string>& categories, const std::string& name) {
  return static_cast<int>(std::find(categories.begin(), categories.end(), name) -
                          categories.begin());
}

}  // namespace

CellSpan covered_cells(double lo, double hi, double extent, int cells) {
  const double pitch = extent / cells;
  CellSpan span;
  span.first = static_cast<int>(std::ceil(lo / pitch - 0.5 - kCellSlack));
  span.last = static_cast<int>(std::floor(hi / pitch - 0.5 + kCellSlack));
  span.first = std::max(span.first, 0);
  span.last = std::min(span.last, cells - 1);
  return span;
}

std::vector<std::string> canonical_categories(const SceneState& scene) {
  std::vector<std::string> categories;
  for (const Placement& p : scene.canonical_placements()) {
    if (std::find(categories.begin(), categories.end(), p.object.category) == categories.end()) {
      categories.push_back(p.object.category);
    }
  }
  if (categories.size() > static_cast<std::size_t>(kMaxCategories)) {
    throw Error(ErrorKind::kCapacityExceeded,
                std::to_string(categories.size()) + " categories exceed the limit of 16");
  }
  return categories;
}

RasterImage rasterize(const SceneState& scene) {
  if (scene.size() > static_cast<std::size_t>(kMaxInstanceIndex + 1)) {
    throw Error(ErrorKind::kCapacityExceeded,
                std::to_string(scene.size()) + " objects exceed the limit of 64");
  }
  const std::vector<std::string> categories = canonical_categories(scene);
  RasterImage image;
  for (const Placement& p : scene.placements()) {
    const int k = parse_object_index(p.object.id).value_or(-1);
    if (k < 0 || k > kMaxInstanceIndex) {
      throw Error(ErrorKind::kCapacityExceeded, "instance index of " + p.object.id +
                                                    " exceeds " + std::to_string(kMaxInstanceIndex));
    }
    const double instance = (k + 1.0) / (kMaxInstanceIndex + 1.0);
    const double category = (category_index(categories, p.object.category) + 1.0) / kMaxCategories;
    const Box box = p.footprint();
    const CellSpan cols =
        covered_cells(box.min_x, box.max_x, scene.table_width(), RasterImage::kWidth);
    const CellSpan rows =
        covered_cells(box.min_y, box.max_y, scene.table_depth(), RasterImage::kHeight);
    for (int r = rows.first; r <= rows.last; ++r) {
      for (int c = cols.first; c <= cols.last; ++c) {
        if (image.at(0, r, c) != 0.0) continue;  // first placement wins a shared edge cell
        image.at(0, r, c) = 1.0;
        image.at(1, r, c) = instance;
        image.at(2, r, c) = category;
      }
    }
  }
  return image;
}

std::string to_ppm(const SceneState& scene) {
  const std::string header =
      "P6\n" + std::to_string(kPpmWidth) + " " + std::to_string(kPpmHeight) + "\n255\n";
  std::string out = header;
  out.resize(header.size() + static_cast<std::size_t>(kPpmWidth) * kPpmHeight * 3, '\xff');
  auto pixel = [&](int row_from_bottom, int col) {
    const int row = kPpmHeight - 1 - row_from_bottom;
    return header.size() + (static_cast<std::size_t>(row) * kPpmWidth + col) * 3;
  };

  const std::vector<std::string> categories = canonical_categories(scene);
  for (const Placement& p : scene.canonical_placements()) {
    const auto& color = kPalette[category_index(categories, p.object.category)];
    const Box box = p.footprint();
    const CellSpan cols = covered_cells(box.min_x, box.max_x, scene.table_width(), kPpmWidth);
    const CellSpan rows = covered_cells(box.min_y, box.max_y, scene.table_depth(), kPpmHeight);
    for (int r = rows.first; r <= rows.last; ++r) {
      for (int c = cols.first; c <= cols.last; ++c) {
        const bool edge = r == rows.first || r == rows.last || c == cols.first || c == cols.last;
        const std::size_t at = pixel(r, c);
        for (int ch = 0; ch < 3; ++ch) {
          out[at + ch] = static_cast<char>(edge ? 0 : color[ch]);
        }
      }
    }
  }
  return out;
}

}  // namespace tidy
