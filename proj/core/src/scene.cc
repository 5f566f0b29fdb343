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

#include "tidy/scene.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "tidy/error.h"

namespace tidy {
namespace {

constexpr std::string_view kObjectPrefix = "obj_";

void validate_object(const ObjectSpec& obj) {
  if (!is_valid_object_id(obj.id)) {
    throw Error(ErrorKind::kInvalidArgument, "malformed object id '" + obj.id + "'");
  }
  if (!(obj.width > 0.0) || !(obj.depth > 0.0) || !std::isfinite(obj.width) ||
      !std::isfinite(obj.depth)) {
    throw Error(ErrorKind::kInvalidArgument,
                "object " + obj.id + " must have positive finite width and depth");
  }
}

bool intervals_overlap(double a_min, double a_max, double b_min, double b_max) {
  return std::min(a_max, b_max) - std::max(a_min, b_min) > kGeometryEpsilon;
}

}  // namespace

std::optional<int> parse_object_index(std::string_view id) {
  if (!id.starts_with(kObjectPrefix)) return std::nullopt;
  const std::string_view digits = id.substr(kObjectPrefix.size());
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  // from_chars accepts a leading minus for signed types.
  if (digits.front() < '0' || digits.front() > '9') return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

bool is_valid_object_id(std::string_view id) { return parse_object_index(id).has_value(); }

std::string make_object_id(int index) { return std::string(kObjectPrefix) + std::to_string(index); }

double intersection_area(const Box& a, const Box& b) {
  const double w = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
  const double h = std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

const Placement* SceneState::find(std::string_view id) const {
  for (const Placement& p : placements_) {
    if (p.object.id == id) return &p;
  }
  return nullptr;
}

std::vector<Placement> SceneState::canonical_placements() const {
  std::vector<Placement> sorted = placements_;
  std::sort(sorted.begin(), sorted.end(), [](const Placement& a, const Placement& b) {
    return parse_object_index(a.object.id).value_or(-1) <
           parse_object_index(b.object.id).value_or(-1);
  });
  return sorted;
}

SceneState new_scene(double table_width, double table_depth) {
  if (!(table_width > 0.0) || !(table_depth > 0.0) || !std::isfinite(table_width) ||
      !std::isfinite(table_depth)) {
    throw Error(ErrorKind::kInvalidArgument, "table dimensions must be positive");
  }
  SceneState scene;
  scene.table_width_ = table_width;
  scene.table_depth_ = table_depth;
  return scene;
}

bool overlaps(const Placement& a, const Placement& b) {
  const Box fa = a.footprint();
  const Box fb = b.footprint();
  return intervals_overlap(fa.min_x, fa.max_x, fb.min_x, fb.max_x) &&
         intervals_overlap(fa.min_y, fa.max_y, fb.min_y, fb.max_y);
}

bool in_bounds(const SceneState& scene, const ObjectSpec& obj, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  const double hw = obj.width / 2;
  const double hd = obj.depth / 2;
  return x - hw >= -kGeometryEpsilon && y - hd >= -kGeometryEpsilon &&
         x + hw <= scene.table_width() + kGeometryEpsilon &&
         y + hd <= scene.table_depth() + kGeometryEpsilon;
}

bool collision_free(const SceneState& scene, const ObjectSpec& obj, double x, double y) {
  if (!in_bounds(scene, obj, x, y)) return false;
  const Placement candidate{obj, x, y};
  for (const Placement& other : scene.placements()) {
    if (other.object.id == obj.id) continue;
    if (overlaps(candidate, other)) return false;
  }
  return true;
}

SceneState place(const SceneState& scene, const ObjectSpec& obj, double x, double y) {
  validate_object(obj);
  if (!in_bounds(scene, obj, x, y)) {
    throw Error(ErrorKind::kPlacementRejected, "out-of-bounds: " + obj.id);
  }
  if (!collision_free(scene, obj, x, y)) {
    throw Error(ErrorKind::kPlacementRejected, "collision: " + obj.id);
  }
  SceneState next = scene;
  for (Placement& p : next.placements_) {
    if (p.object.id == obj.id) {
      p = Placement{obj, x, y};
      return next;
    }
  }
  next.placements_.push_back(Placement{obj, x, y});
  return next;
}

SceneState remove(const SceneState& scene, std::string_view object_id) {
  SceneState next = scene;
  auto it = std::find_if(next.placements_.begin(), next.placements_.end(),
                         [&](const Placement& p) { return p.object.id == object_id; });
  if (it == next.placements_.end()) {
    throw Error(ErrorKind::kNotFound, "no object '" + std::string(object_id) + "' on the table");
  }
  next.placements_.erase(it);
  return next;
}

std::string check_invariants(const SceneState& scene) {
  std::unordered_set<std::string> ids;
  const auto& ps = scene.placements();
  for (const Placement& p : ps) {
    if (!is_valid_object_id(p.object.id)) return "malformed object id '" + p.object.id + "'";
    if (!ids.insert(p.object.id).second) return "duplicate object id " + p.object.id;
    if (!(p.object.width > 0.0) || !(p.object.depth > 0.0)) {
      return "non-positive size for " + p.object.id;
    }
    if (!in_bounds(scene, p.object, p.x, p.y)) return "out of bounds: " + p.object.id;
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (overlaps(ps[i], ps[j])) {
        return "overlap between " + ps[i].object.id + " and " + ps[j].object.id;
      }
    }
  }
  return {};
}

SceneState scene_from_placements(double table_width, double table_depth,
                                 std::vector<Placement> placements) {
  SceneState scene = new_scene(table_width, table_depth);
  scene.placements_ = std::move(placements);
  if (std::string why = check_invariants(scene); !why.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "invalid scene: " + why);
  }
  return scene;
}

}  // namespace tidy
