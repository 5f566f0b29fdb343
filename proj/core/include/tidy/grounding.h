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

#ifndef TIDY_GROUNDING_H_
#define TIDY_GROUNDING_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tidy/planner.h"
#include "tidy/rng.h"
#include "tidy/scene.h"
#include "tidy/scorer.h"

namespace tidy {

enum class GroundingStrategy { kScore, kCollisionOnly };

std::string_view to_string(GroundingStrategy strategy);
// Accepts "score" and "collision-only"; throws kInvalidArgument otherwise.
GroundingStrategy parse_grounding_strategy(std::string_view text);

struct GroundingConfig {
  GroundingStrategy strategy = GroundingStrategy::kScore;
  int samples = 64;
  double sigma_initial_factor = 1.5;
  double sigma_growth = 1.5;
  int rejections_per_growth = 8;
  int max_attempts = 512;
  std::uint64_t seed = 0;
};

// Throws kInvalidArgument unless samples >= 1, growth > 1 and the remaining
// counts and factors are positive.
void validate(const GroundingConfig& config);

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

struct GroundedAction {
  std::string object_id;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const GroundedAction&) const = default;
};

// Group name -> ids already placed into that group during the episode.
using GroupRegistry = std::map<std::string, std::vector<std::string>>;

// Index 0..3 = lower-left, lower-right, upper-left, upper-right, with y
// growing toward the far edge.
Box table_quadrant(const SceneState& scene, int index);

// Quadrant with the least footprint area, ties to the lowest index. The
// object named `ignore` (if any) does not count.
int least_occupied_quadrant(const SceneState& scene, std::string_view ignore = {});

// NEAR: center of the anchor object. GROUP: centroid of members already in
// the registry (excluding the acting object), else the center of the least
// occupied quadrant. AT: the coordinates. Throws kMissingAnchor when a NEAR
// anchor is not on the table.
Point anchor_of(const SceneState& scene, const ActionProposal& action,
                const GroupRegistry& registry);

// Gaussian samples around `anchor`; sigma starts at sigma_initial_factor *
// `reach` and grows by sigma_growth after every rejections_per_growth
// consecutive rejections. Returns up to `samples` collision-free in-bounds
// positions for `object`. Throws kGroundingInfeasible if none is found
// within max_attempts draws.
std::vector<Point> sample_candidates(const SceneState& scene, const ObjectSpec& object,
                                     Point anchor, double reach, const GroundingConfig& config,
                                     Rng& rng);

struct Candidate {
  Point position;
  std::optional<double> score;      // set when a model was available
  std::optional<double> pair_prob;  // P(current scene tidier than candidate scene)
};

struct GroundingOutcome {
  GroundedAction action;
  Point anchor;
  std::vector<Candidate> candidates;
  std::size_t chosen = 0;
};

// Grounds one NEAR/GROUP action. Score strategy picks the candidate whose
// resulting scene scores highest (lowest index on ties) and requires a
// model; collision-only picks the first candidate. Throws kNotFound for an
// unknown object, kMissingAnchor, kGroundingInfeasible, and kInvalidArgument
// for AT actions or a missing model.
GroundingOutcome ground(const ScorerModel* model, const SceneState& scene,
                        const ActionProposal& action, const GroupRegistry& registry,
                        const GroundingConfig& config, Rng& rng);

struct SkippedAction {
  std::string object_id;
  std::string reason;

  bool operator==(const SkippedAction&) const = default;
};

struct TraceRecord {
  std::size_t step = 0;
  ActionProposal proposal;
  bool applied = false;
  std::string reason;  // set when skipped
  std::optional<Point> anchor;
  std::vector<Candidate> candidates;
  std::optional<std::size_t> chosen;
  std::optional<GroundedAction> grounded;
};

struct EpisodeResult {
  std::vector<GroundedAction> actions;
  std::vector<SkippedAction> skipped;
  SceneState final_scene;
  std::vector<TraceRecord> trace;
};

// Applies the plan in order. AT actions skip sampling and are applied only if
// collision-free. Every failure is recorded as a skip and leaves the object
// where it was. Action i draws from split_seed(config.seed, i).
EpisodeResult tidy_episode(const SceneState& scene, const PlanProposal& plan,
                           const ScorerModel* model, const GroundingConfig& config);

// {"actions":[{"object","x","y","z"}...],"skipped":[{"object","reason"}...]}
std::string episode_plan_json(const EpisodeResult& result);
// One JSON object per line, one line per plan action.
std::string episode_trace_jsonl(const EpisodeResult& result);

}  // namespace tidy

#endif  // TIDY_GROUNDING_H_
