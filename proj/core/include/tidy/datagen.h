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

#ifndef TIDY_DATAGEN_H_
#define TIDY_DATAGEN_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tidy/rng.h"
#include "tidy/scene.h"

namespace tidy {

enum class TemplateKind { kRows, kGrid, kEdges };

std::string_view to_string(TemplateKind kind);
TemplateKind parse_template_kind(std::string_view name);

inline constexpr double kTemplateGap = 0.02;       // between members of a group
inline constexpr double kTemplateGroupGap = 0.06;  // between groups
inline constexpr int kTemplateRetries = 100;
inline constexpr int kWalkPlacementTries = 100;
inline constexpr int kWalkObjectRepicks = 10;
inline constexpr int kVariantTries = 20;
inline constexpr double kMinDisplacement = 0.02;
inline constexpr double kMaxDisplacement = 0.08;

// Household object kinds used to build rosters; every member of a category
// shares one footprint.
struct CategorySpec {
  std::string name;
  double width = 0.0;
  double depth = 0.0;
};
const std::vector<CategorySpec>& object_catalog();

struct RosterConfig {
  int min_objects = 8;
  int max_objects = 12;
  int min_categories = 2;
  int max_categories = 3;

  bool operator==(const RosterConfig&) const = default;
};

// Draws categories without replacement from the catalog (at least two
// members each) and assigns shuffled ids obj_0..obj_{n-1}.
std::vector<ObjectSpec> sample_roster(const RosterConfig& config, Rng& rng);

// Tidy configuration with objects grouped by category:
//   rows  - one horizontal row per category, rows stacked
//   grid  - one near-square block per category
//   edges - one row per category along alternating table edges
// Group origins are jittered; throws kLayoutInfeasible when the roster does
// not fit after kTemplateRetries attempts.
SceneState make_tidy_scene(TemplateKind kind, std::span<const ObjectSpec> roster, Rng& rng,
                           double table_width = kDefaultTableWidth,
                           double table_depth = kDefaultTableDepth);

struct Trajectory {
  std::vector<SceneState> states;  // states[0] is the tidy start
  // moved_ids[t - 1] is the object moved between states[t - 1] and states[t].
  std::vector<std::string> moved_ids;
  // local_variants[t - 1] holds displaced copies of states[t - 1] in which
  // moved_ids[t - 1] was shifted slightly. Empty until local_disturb runs.
  std::vector<std::vector<SceneState>> local_variants;

  std::size_t length() const { return states.size(); }
};

// Global stage: `steps` single-object random moves. Stops early when no
// object can be relocated.
Trajectory global_walk(const SceneState& tidy_scene, int steps, Rng& rng);

// Local stage: up to `variants` one-object displacements per step.
void local_disturb(Trajectory& trajectory, int variants, Rng& rng);

enum class Provenance { kGlobal, kLocal };
std::string_view to_string(Provenance provenance);

struct PreferencePair {
  std::string tidier;
  std::string messier;
  Provenance provenance = Provenance::kGlobal;
  int trajectory = 0;
  int t_tidier = 0;
  int t_messier = 0;

  bool operator==(const PreferencePair&) const = default;
};

std::string state_scene_id(int trajectory, int t);
std::string variant_scene_id(int trajectory, int t, int j);

// (t, t + g) index pairs for g in {g0, 2 g0, 4 g0} with g0 = max(1, t / 3),
// clipped to the trajectory.
std::vector<std::pair<int, int>> global_schedule(int length);

// Global pairs from the schedule followed by one local pair per variant.
std::vector<PreferencePair> select_pairs(const Trajectory& trajectory, int trajectory_id);

// Moves round(fraction * size) distinct objects, chosen uniformly, to uniform
// collision-free positions. Objects that cannot be relocated stay put.
SceneState scatter_objects(const SceneState& scene, double fraction, Rng& rng);

// Evaluation scene: a tidy template (rows or grid) with half of its objects
// scattered, fully determined by `seed`.
SceneState make_evaluation_scene(std::uint64_t seed, const RosterConfig& roster = {});

struct DatasetMeta {
  std::uint64_t master_seed = 0;
  int trajectory_count = 300;
  int walk_steps = 12;
  int variants_per_step = 4;
  std::vector<TemplateKind> templates = {TemplateKind::kRows, TemplateKind::kGrid};
  RosterConfig roster;
  double table_width = kDefaultTableWidth;
  double table_depth = kDefaultTableDepth;
  int format_version = 1;

  bool operator==(const DatasetMeta&) const = default;
};

// Throws kInvalidArgument on negative counts, empty templates, bad roster
// bounds or an unsupported version.
void validate(const DatasetMeta& meta);

// Full trajectory `index` of the dataset, seeded with split_seed(master, index).
Trajectory generate_trajectory(const DatasetMeta& meta, int index);

struct Dataset {
  DatasetMeta meta;
  std::vector<std::string> scene_ids;  // file order
  std::unordered_map<std::string, SceneState> scenes;
  std::vector<PreferencePair> pairs;

  // Throws kDanglingReference for unknown ids.
  const SceneState& scene(const std::string& id) const;
};

// Builds the dataset in memory. Trajectories may be generated on several
// worker threads; the merge is always in ascending trajectory order.
Dataset generate_dataset(const DatasetMeta& meta, int workers = 1);

// The three files of a dataset directory, byte-exact.
struct DatasetFiles {
  std::string meta_json;
  std::string scenes_jsonl;
  std::string pairs_jsonl;
};
DatasetFiles serialize_dataset(const Dataset& dataset);

// Writes meta.json, and scenes.jsonl/pairs.jsonl when there is at least one
// trajectory. Throws kIoError.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Loads and validates a dataset directory: kIoError for unreadable or
// malformed files, kDanglingReference for pairs naming unknown scenes.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace tidy

#endif  // TIDY_DATAGEN_H_
