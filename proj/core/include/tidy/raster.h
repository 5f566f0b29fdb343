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

#ifndef TIDY_RASTER_H_
#define TIDY_RASTER_H_

#include <cstddef>
#include <string>
#include <vector>

#include "tidy/scene.h"

namespace tidy {

// Three-channel grid image of a table, row-major per channel. Row 0 is the
// y = 0 edge of the table, column 0 the x = 0 edge.
//   channel 0: occupancy, 0 or 1
//   channel 1: instance, (k + 1) / 64 inside obj_k
//   channel 2: category, (c + 1) / 16 inside objects of category index c
struct RasterImage {
  static constexpr int kChannels = 3;
  static constexpr int kHeight = 64;
  static constexpr int kWidth = 96;
  static constexpr std::size_t kPlane = static_cast<std::size_t>(kHeight) * kWidth;
  static constexpr std::size_t kSize = kChannels * kPlane;

  std::vector<double> data = std::vector<double>(kSize, 0.0);

  double at(int channel, int row, int col) const {
    return data[channel * kPlane + static_cast<std::size_t>(row) * kWidth + col];
  }
  double& at(int channel, int row, int col) {
    return data[channel * kPlane + static_cast<std::size_t>(row) * kWidth + col];
  }
  bool operator==(const RasterImage&) const = default;
};

inline constexpr int kMaxInstanceIndex = 63;
inline constexpr int kMaxCategories = 16;

// Inclusive index range of grid cells whose centers fall inside [lo, hi] on
// an axis of `cells` cells spanning `extent`. Empty when first > last.
struct CellSpan {
  int first = 0;
  int last = -1;
};
CellSpan covered_cells(double lo, double hi, double extent, int cells);

// Category indices in canonical order: first appearance when placements are
// sorted by object index. Throws kCapacityExceeded past kMaxCategories.
std::vector<std::string> canonical_categories(const SceneState& scene);

// Throws kCapacityExceeded for more than 64 objects, an object index above
// kMaxInstanceIndex, or more than 16 categories.
RasterImage rasterize(const SceneState& scene);

inline constexpr int kPpmWidth = 384;
inline constexpr int kPpmHeight = 256;

// Binary P6 image, white background, per-category fill and black outlines.
// The top image row shows the far (y = depth) edge of the table.
std::string to_ppm(const SceneState& scene);

}  // namespace tidy

#endif  // TIDY_RASTER_H_
