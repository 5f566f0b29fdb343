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

#ifndef TIDY_SCENE_H_
#define TIDY_SCENE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tidy {

inline constexpr double kDefaultTableWidth = 1.2;
inline constexpr double kDefaultTableDepth = 0.8;

// Slack used by every geometric comparison, in table units. Two footprints
// whose interiors intersect by less than this are treated as touching.
inline constexpr double kGeometryEpsilon = 1e-9;

// Parses the integer k out of an "obj_<k>" token; nullopt when malformed.
std::optional<int> parse_object_index(std::string_view id);
bool is_valid_object_id(std::string_view id);
std::string make_object_id(int index);

struct ObjectSpec {
  std::string id;
  std::string category;
  double width = 0.0;
  double depth = 0.0;

  double max_extent() const { return width > depth ? width : depth; }
  bool operator==(const ObjectSpec&) const = default;
};

struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double area() const { return (max_x - min_x) * (max_y - min_y); }
};

// Area of the intersection of two boxes, 0 when disjoint or touching.
double intersection_area(const Box& a, const Box& b);

// An object resting on the table; (x, y) is the footprint center.
struct Placement {
  ObjectSpec object;
  double x = 0.0;
  double y = 0.0;

  Box footprint() const {
    return {x - object.width / 2, y - object.depth / 2, x + object.width / 2,
            y + object.depth / 2};
  }
  bool operator==(const Placement&) const = default;
};

// Immutable-by-convention table state. Mutating operations are free
// functions returning a new state.
class SceneState {
 public:
  SceneState() = default;

  double table_width() const { return table_width_; }
  double table_depth() const { return table_depth_; }
  const std::vector<Placement>& placements() const { return placements_; }
  std::size_t size() const { return placements_.size(); }
  bool empty() const { return placements_.empty(); }

  const Placement* find(std::string_view id) const;

  // Placements sorted by numeric object index, the canonical order used by
  // rendering and description.
  std::vector<Placement> canonical_placements() const;

  bool operator==(const SceneState&) const = default;

 private:
  friend SceneState new_scene(double, double);
  friend SceneState place(const SceneState&, const ObjectSpec&, double, double);
  friend SceneState remove(const SceneState&, std::string_view);
  friend SceneState scene_from_placements(double, double, std::vector<Placement>);

  double table_width_ = kDefaultTableWidth;
  double table_depth_ = kDefaultTableDepth;
  std::vector<Placement> placements_;
};

// Throws kInvalidArgument on non-positive dimensions.
SceneState new_scene(double table_width, double table_depth);

// True iff the open interiors of the two footprints intersect.
bool overlaps(const Placement& a, const Placement& b);

bool in_bounds(const SceneState& scene, const ObjectSpec& obj, double x, double y);

// True iff `obj` at (x, y) stays on the table and overlaps nothing else.
// A current placement of `obj` itself is ignored.
bool collision_free(const SceneState& scene, const ObjectSpec& obj, double x, double y);

// Places (or moves) `obj`. Throws kPlacementRejected when the target is out of
// bounds or collides, and kInvalidArgument for malformed objects.
SceneState place(const SceneState& scene, const ObjectSpec& obj, double x, double y);

// Throws kNotFound for unknown ids.
SceneState remove(const SceneState& scene, std::string_view object_id);

// Builds a scene from a full placement list and validates every invariant:
// object shape, id uniqueness, bounds and pairwise overlap.
SceneState scene_from_placements(double table_width, double table_depth,
                                 std::vector<Placement> placements);

// Returns an empty string when all invariants hold, otherwise a description
// of the first violation.
std::string check_invariants(const SceneState& scene);

}  // namespace tidy

#endif  // TIDY_SCENE_H_
