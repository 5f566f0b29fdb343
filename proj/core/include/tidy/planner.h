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

#ifndef TIDY_PLANNER_H_
#define TIDY_PLANNER_H_

#include <string>
#include <string_view>
#include <vector>

#include "tidy/scene.h"

namespace tidy {

enum class TargetKind { kNear, kGroup, kAt };

// One "pick object, place it relative to something" step. `anchor` holds the
// NEAR object id or the GROUP name; (x, y) is only meaningful for AT.
struct ActionProposal {
  std::string object_id;
  TargetKind kind = TargetKind::kNear;
  std::string anchor;
  double x = 0.0;
  double y = 0.0;

  static ActionProposal near(std::string object_id, std::string anchor_id);
  static ActionProposal group(std::string object_id, std::string group_name);
  static ActionProposal at(std::string object_id, double x, double y);

  bool operator==(const ActionProposal&) const = default;
};

struct PlanProposal {
  std::vector<std::string> rules;
  std::vector<ActionProposal> actions;

  bool operator==(const PlanProposal&) const = default;
};

enum class PromptMode { kObjectCentric, kDirectCoordinates };

std::string_view to_string(PromptMode mode);
// Accepts "object-centric" and "direct"; throws kInvalidArgument otherwise.
PromptMode parse_prompt_mode(std::string_view text);

// Header with the table size, then one line per object sorted by id:
//   obj_3: category=cup, size=0.080x0.080, at=(0.412,0.220)
std::string describe_scene(const SceneState& scene);

// Throws kInvalidArgument for more than two sample solutions.
std::string build_prompt(std::string_view description, PromptMode mode,
                         const std::vector<std::string>& sample_solutions = {});

// Line grammar, keywords case-insensitive, '#' starts a comment:
//   RULES:
//   - <free text>
//   ACTIONS:
//   <n>. PICK obj_<k> PLACE NEAR obj_<m>
//   <n>. PICK obj_<k> PLACE GROUP <name>
//   <n>. PICK obj_<k> PLACE AT <x> <y>
// Malformed lines are skipped; each skip appends "line <n>: <reason>" to
// `diagnostics` when given. Throws kParseFailure when a section is missing or
// no valid rule or action remains.
PlanProposal parse_plan(std::string_view text, std::vector<std::string>* diagnostics = nullptr);

// Canonical text form; parse_plan(serialize_plan(p)) == p.
std::string serialize_plan(const PlanProposal& plan);

// Deterministic offline planner: one GROUP action for the lowest-id member of
// each category and NEAR actions for the rest. Throws kInvalidArgument on an
// empty scene.
PlanProposal fallback_plan(const SceneState& scene);

}  // namespace tidy

#endif  // TIDY_PLANNER_H_
