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

#include "tidy/grounding.h"

#include <algorithm>
#include <cmath>

#include "scene_json.h"
#include "tidy/error.h"
#include "tidy/raster.h"

namespace tidy {
namespace {

std::string describe_action(const ActionProposal& a) {
  switch (a.kind) {
    case TargetKind::kNear:
      return "NEAR " + a.anchor;
    case TargetKind::kGroup:
      return "GROUP " + a.anchor;
    case TargetKind::kAt: {
      Json j = Json::array({a.x, a.y});
      return "AT " + j[0].dump() + " " + j[1].dump();
    }
  }
  return {};
}

const Placement& require_object(const SceneState& scene, const std::string& id) {
  const Placement* p = scene.find(id);
  if (p == nullptr) throw Error(ErrorKind::kNotFound, "object '" + id + "' is not on the table");
  return *p;
}

}  // namespace

std::string_view to_string(GroundingStrategy strategy) {
  return strategy == GroundingStrategy::kScore ? "score" : "collision-only";
}

GroundingStrategy parse_grounding_strategy(std::string_view text) {
  if (text == "score") return GroundingStrategy::kScore;
  if (text == "collision-only") return GroundingStrategy::kCollisionOnly;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown grounding strategy '" + std::string(text) + "'");
}

void validate(const GroundingConfig& config) {
  if (config.samples < 1 || config.max_attempts < 1 || config.rejections_per_growth < 1 ||
      !(config.sigma_initial_factor > 0.0) || !(config.sigma_growth > 1.0) ||
      !std::isfinite(config.sigma_initial_factor) || !std::isfinite(config.sigma_growth)) {
    throw Error(ErrorKind::kInvalidArgument,
                "grounding config needs samples >= 1, positive counts and sigma_growth > 1");
  }
}

Box table_quadrant(const SceneState& scene, int index) {
  const double hw = scene.table_width() / 2;
  const double hd = scene.table_depth() / 2;
  const double x0 = (index % 2) * hw;
  const double y0 = (index / 2) * hd;
  return {x0, y0, x0 + hw, y0 + hd};
}

int least_occupied_quadrant(const SceneState& scene, std::string_view ignore) {
  int best = 0;
  double best_area = 0.0;
  for (int q = 0; q < 4; ++q) {
    const Box quad = table_quadrant(scene, q);
    double area = 0.0;
    for (const Placement& p : scene.canonical_placements()) {
      if (p.object.id != ignore) area += intersection_area(quad, p.footprint());
    }
    if (q == 0 || area < best_area) {
      best = q;
      best_area = area;
    }
  }
  return best;
}

Point anchor_of(const SceneState& scene, const ActionProposal& action,
                const GroupRegistry& registry) {
  switch (action.kind) {
    case TargetKind::kNear: {
      const Placement* a = scene.find(action.anchor);
      if (a == nullptr) {
        throw Error(ErrorKind::kMissingAnchor, "anchor '" + action.anchor + "' is not on the table");
      }
      return {a->x, a->y};
    }
    case TargetKind::kGroup: {
      double sx = 0.0;
      double sy = 0.0;
      int n = 0;
      if (auto it = registry.find(action.anchor); it != registry.end()) {
        for (const std::string& id : it->second) {
          if (id == action.object_id) continue;
          if (const Placement* m = scene.find(id)) {
            sx += m->x;
            sy += m->y;
            ++n;
          }
        }
      }
      if (n > 0) return {sx / n, sy / n};
      const Box quad = table_quadrant(scene, least_occupied_quadrant(scene, action.object_id));
      return {(quad.min_x + quad.max_x) / 2, (quad.min_y + quad.max_y) / 2};
    }
    case TargetKind::kAt:
      return {action.x, action.y};
  }
  return {};
}

std::vector<Point> sample_candidates(const SceneState& scene, const ObjectSpec& object,
                                     Point anchor, double reach, const GroundingConfig& config,
                                     Rng& rng) {
  validate(config);
  std::vector<Point> out;
  double sigma = config.sigma_initial_factor * reach;
  int consecutive = 0;
  for (int attempt = 0;
       attempt < config.max_attempts && out.size() < static_cast<std::size_t>(config.samples);
       ++attempt) {
    const double x = anchor.x + sigma * rng.normal();
    const double y = anchor.y + sigma * rng.normal();
    if (collision_free(scene, object, x, y)) {
      out.push_back({x, y});
      consecutive = 0;
    } else if (++consecutive % config.rejections_per_growth == 0) {
      sigma *= config.sigma_growth;
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::kGroundingInfeasible,
                "no collision-free position for '" + object.id + "' after " +
                    std::to_string(config.max_attempts) + " attempts");
  }
  return out;
}

GroundingOutcome ground(const ScorerModel* model, const SceneState& scene,
                        const ActionProposal& action, const GroupRegistry& registry,
                        const GroundingConfig& config, Rng& rng) {
  validate(config);
  if (action.kind == TargetKind::kAt) {
    throw Error(ErrorKind::kInvalidArgument, "AT actions are applied directly, not grounded");
  }
  if (config.strategy == GroundingStrategy::kScore && model == nullptr) {
    throw Error(ErrorKind::kInvalidArgument, "score grounding needs a scorer model");
  }
  const Placement& self = require_object(scene, action.object_id);
  const Point anchor = anchor_of(scene, action, registry);
  double reach = self.object.max_extent() / 2;
  if (action.kind == TargetKind::kNear) {
    reach += scene.find(action.anchor)->object.max_extent() / 2;
  }

  GroundingOutcome out;
  out.anchor = anchor;
  for (const Point& p : sample_candidates(scene, self.object, anchor, reach, config, rng)) {
    out.candidates.push_back({p, std::nullopt, std::nullopt});
  }

  if (model != nullptr) {
    const double current = score(*model, rasterize(scene));
    for (Candidate& c : out.candidates) {
      const SceneState moved = place(scene, self.object, c.position.x, c.position.y);
      c.score = score(*model, rasterize(moved));
      c.pair_prob = pair_prob_from_scores(current, *c.score);
    }
  }
  if (config.strategy == GroundingStrategy::kScore) {
    for (std::size_t i = 1; i < out.candidates.size(); ++i) {
      if (*out.candidates[i].score > *out.candidates[out.chosen].score) out.chosen = i;
    }
  }
  const Point& p = out.candidates[out.chosen].position;
  out.action = {action.object_id, p.x, p.y, 0.0};
  return out;
}

EpisodeResult tidy_episode(const SceneState& scene, const PlanProposal& plan,
                           const ScorerModel* model, const GroundingConfig& config) {
  validate(config);
  EpisodeResult result;
  result.final_scene = scene;
  GroupRegistry registry;

  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const ActionProposal& action = plan.actions[i];
    TraceRecord record;
    record.step = i;
    record.proposal = action;
    const SceneState& current = result.final_scene;
    try {
      GroundedAction grounded;
      if (action.kind == TargetKind::kAt) {
        const Placement& self = require_object(current, action.object_id);
        record.anchor = Point{action.x, action.y};
        if (!in_bounds(current, self.object, action.x, action.y)) {
          throw Error(ErrorKind::kPlacementRejected, "out-of-bounds");
        }
        if (!collision_free(current, self.object, action.x, action.y)) {
          throw Error(ErrorKind::kPlacementRejected, "collision");
        }
        grounded = {action.object_id, action.x, action.y, 0.0};
      } else {
        Rng rng(split_seed(config.seed, i));
        GroundingOutcome outcome = ground(model, current, action, registry, config, rng);
        record.anchor = outcome.anchor;
        record.candidates = std::move(outcome.candidates);
        record.chosen = outcome.chosen;
        grounded = outcome.action;
      }
      const ObjectSpec object = require_object(current, grounded.object_id).object;
      result.final_scene = place(current, object, grounded.x, grounded.y);
      if (action.kind == TargetKind::kGroup) registry[action.anchor].push_back(action.object_id);
      record.applied = true;
      record.grounded = grounded;
      result.actions.push_back(grounded);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kInvalidArgument) throw;
      record.reason = std::string(to_string(e.kind()));
      result.skipped.push_back({action.object_id, record.reason});
    }
    result.trace.push_back(std::move(record));
  }
  return result;
}

std::string episode_plan_json(const EpisodeResult& result) {
  Json actions = Json::array();
  for (const GroundedAction& a : result.actions) {
    actions.push_back({{"object", a.object_id}, {"x", a.x}, {"y", a.y}, {"z", a.z}});
  }
  Json skipped = Json::array();
  for (const SkippedAction& s : result.skipped) {
    skipped.push_back({{"object", s.object_id}, {"reason", s.reason}});
  }
  return Json{{"actions", std::move(actions)}, {"skipped", std::move(skipped)}}.dump() + "\n";
}

std::string episode_trace_jsonl(const EpisodeResult& result) {
  std::string out;
  for (const TraceRecord& r : result.trace) {
    Json line = {{"step", r.step},
                 {"object", r.proposal.object_id},
                 {"action", describe_action(r.proposal)},
                 {"status", r.applied ? "applied" : "skipped"}};
    if (!r.applied) line["reason"] = r.reason;
    if (r.anchor) line["anchor"] = {r.anchor->x, r.anchor->y};
    Json candidates = Json::array();
    for (const Candidate& c : r.candidates) {
      Json cj = {{"x", c.position.x}, {"y", c.position.y}};
      if (c.score) cj["score"] = *c.score;
      if (c.pair_prob) cj["pair_prob"] = *c.pair_prob;
      candidates.push_back(std::move(cj));
    }
    line["candidates"] = std::move(candidates);
    if (r.chosen) {
      line["chosen"] = *r.chosen;
      if (r.candidates[*r.chosen].score) line["chosen_score"] = *r.candidates[*r.chosen].score;
    }
    if (r.grounded) line["placed"] = {r.grounded->x, r.grounded->y, r.grounded->z};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace tidy
