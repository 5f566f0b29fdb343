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

#include "tidy/datagen.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "scene_json.h"
#include "tidy/error.h"
#include "tidy/scene_io.h"

namespace tidy {
namespace {

struct Group {
  std::string category;
  std::vector<ObjectSpec> members;
};

std::vector<Group> group_by_category(std::span<const ObjectSpec> roster) {
  std::vector<Group> groups;
  for (const ObjectSpec& obj : roster) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.category == obj.category; });
    if (it == groups.end()) {
      groups.push_back({obj.category, {}});
      it = groups.end() - 1;
    }
    it->members.push_back(obj);
  }
  return groups;
}

double max_depth(const Group& g) {
  double d = 0.0;
  for (const ObjectSpec& o : g.members) d = std::max(d, o.depth);
  return d;
}

double max_width(const Group& g) {
  double w = 0.0;
  for (const ObjectSpec& o : g.members) w = std::max(w, o.width);
  return w;
}

double row_length(const Group& g) {
  double len = 0.0;
  for (const ObjectSpec& o : g.members) len += o.width;
  return len + kTemplateGap * static_cast<double>(g.members.size() - 1);
}

double column_length(const Group& g) {
  double len = 0.0;
  for (const ObjectSpec& o : g.members) len += o.depth;
  return len + kTemplateGap * static_cast<double>(g.members.size() - 1);
}

// Uniform offset in [0, slack]; negative slack means the layout cannot fit.
bool jitter(Rng& rng, double slack, double& out) {
  if (slack < -kGeometryEpsilon) return false;
  out = slack > 0.0 ? rng.uniform(0.0, slack) : 0.0;
  return true;
}

// Lays `g` out left to right starting at x0 with all centers at y.
SceneState place_row(SceneState scene, const Group& g, double x0, double y) {
  double x = x0;
  for (const ObjectSpec& o : g.members) {
    scene = place(scene, o, x + o.width / 2, y);
    x += o.width + kTemplateGap;
  }
  return scene;
}

// Lays `g` out bottom to top starting at y0 with all centers at x.
SceneState place_column(SceneState scene, const Group& g, double x, double y0) {
  double y = y0;
  for (const ObjectSpec& o : g.members) {
    scene = place(scene, o, x, y + o.depth / 2);
    y += o.depth + kTemplateGap;
  }
  return scene;
}

std::optional<SceneState> try_rows(const std::vector<Group>& groups, Rng& rng, double w,
                                   double d) {
  double height = 0.0;
  for (const Group& g : groups) height += max_depth(g);
  height += kTemplateGroupGap * static_cast<double>(groups.size() - 1);
  double y = 0.0;
  if (!jitter(rng, d - height, y)) return std::nullopt;
  SceneState scene = new_scene(w, d);
  for (const Group& g : groups) {
    double x0 = 0.0;
    if (!jitter(rng, w - row_length(g), x0)) return std::nullopt;
    scene = place_row(std::move(scene), g, x0, y + max_depth(g) / 2);
    y += max_depth(g) + kTemplateGroupGap;
  }
  return scene;
}

std::optional<SceneState> try_grid(const std::vector<Group>& groups, Rng& rng, double w,
                                   double d) {
  SceneState scene = new_scene(w, d);
  std::vector<Box> blocks;
  for (const Group& g : groups) {
    const int n = static_cast<int>(g.members.size());
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int rows = (n + cols - 1) / cols;
    const double cell_w = max_width(g);
    const double cell_d = max_depth(g);
    const double block_w = cols * cell_w + (cols - 1) * kTemplateGap;
    const double block_d = rows * cell_d + (rows - 1) * kTemplateGap;
    double x0 = 0.0;
    double y0 = 0.0;
    if (!jitter(rng, w - block_w, x0) || !jitter(rng, d - block_d, y0)) return std::nullopt;
    const Box block{x0, y0, x0 + block_w, y0 + block_d};
    for (const Box& other : blocks) {
      const Box padded{other.min_x - kTemplateGroupGap, other.min_y - kTemplateGroupGap,
                       other.max_x + kTemplateGroupGap, other.max_y + kTemplateGroupGap};
      if (intersection_area(block, padded) > 0.0) return std::nullopt;
    }
    blocks.push_back(block);
    for (int i = 0; i < n; ++i) {
      const int r = i / cols;
      const int c = i % cols;
      const double cx = x0 + c * (cell_w + kTemplateGap) + cell_w / 2;
      const double cy = y0 + r * (cell_d + kTemplateGap) + cell_d / 2;
      scene = place(scene, g.members[i], cx, cy);
    }
  }
  return scene;
}

std::optional<SceneState> try_edges(const std::vector<Group>& groups, Rng& rng, double w,
                                    double d) {
  SceneState scene = new_scene(w, d);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const Group& g = groups[i];
    // Later laps around the table move one group gap further inward.
    const double inset = static_cast<double>(i / 4) * (kTemplateGroupGap + 0.16);
    double offset = 0.0;
    switch (i % 4) {
      case 0:  // near edge, y = 0
        if (!jitter(rng, w - row_length(g), offset)) return std::nullopt;
        scene = place_row(std::move(scene), g, offset, inset + max_depth(g) / 2);
        break;
      case 1:  // far edge, y = depth
        if (!jitter(rng, w - row_length(g), offset)) return std::nullopt;
        scene = place_row(std::move(scene), g, offset, d - inset - max_depth(g) / 2);
        break;
      case 2:  // left edge, x = 0
        if (!jitter(rng, d - column_length(g), offset)) return std::nullopt;
        scene = place_column(std::move(scene), g, inset + max_width(g) / 2, offset);
        break;
      default:  // right edge, x = width
        if (!jitter(rng, d - column_length(g), offset)) return std::nullopt;
        scene = place_column(std::move(scene), g, w - inset - max_width(g) / 2, offset);
        break;
    }
  }
  return scene;
}

// Moves `id` to a uniformly drawn collision-free position, if one is found
// within kWalkPlacementTries draws.
std::optional<SceneState> relocate(const SceneState& scene, const ObjectSpec& obj, Rng& rng) {
  const double hw = obj.width / 2;
  const double hd = obj.depth / 2;
  for (int attempt = 0; attempt < kWalkPlacementTries; ++attempt) {
    const double x = rng.uniform(hw, scene.table_width() - hw);
    const double y = rng.uniform(hd, scene.table_depth() - hd);
    if (collision_free(scene, obj, x, y)) return place(scene, obj, x, y);
  }
  return std::nullopt;
}

const char* provenance_name(Provenance p) { return p == Provenance::kGlobal ? "global" : "local"; }

Json meta_to_json(const DatasetMeta& meta) {
  Json templates = Json::array();
  for (TemplateKind t : meta.templates) templates.push_back(std::string(to_string(t)));
  return {{"format_version", meta.format_version},
          {"master_seed", meta.master_seed},
          {"trajectory_count", meta.trajectory_count},
          {"walk_steps", meta.walk_steps},
          {"variants_per_step", meta.variants_per_step},
          {"templates", std::move(templates)},
          {"roster",
           {{"min_objects", meta.roster.min_objects},
            {"max_objects", meta.roster.max_objects},
            {"min_categories", meta.roster.min_categories},
            {"max_categories", meta.roster.max_categories}}},
          {"table", {{"width", meta.table_width}, {"depth", meta.table_depth}}}};
}

DatasetMeta meta_from_json(const Json& j) {
  DatasetMeta meta;
  meta.format_version = j.at("format_version").get<int>();
  meta.master_seed = j.at("master_seed").get<std::uint64_t>();
  meta.trajectory_count = j.at("trajectory_count").get<int>();
  meta.walk_steps = j.at("walk_steps").get<int>();
  meta.variants_per_step = j.at("variants_per_step").get<int>();
  meta.templates.clear();
  for (const Json& t : j.at("templates")) {
    meta.templates.push_back(parse_template_kind(t.get<std::string>()));
  }
  const Json& r = j.at("roster");
  meta.roster.min_objects = r.at("min_objects").get<int>();
  meta.roster.max_objects = r.at("max_objects").get<int>();
  meta.roster.min_categories = r.at("min_categories").get<int>();
  meta.roster.max_categories = r.at("max_categories").get<int>();
  meta.table_width = j.at("table").at("width").get<double>();
  meta.table_depth = j.at("table").at("depth").get<double>();
  return meta;
}

}  // namespace

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kRows: return "rows";
    case TemplateKind::kGrid: return "grid";
    case TemplateKind::kEdges: return "edges";
  }
  return "rows";
}

TemplateKind parse_template_kind(std::string_view name) {
  if (name == "rows") return TemplateKind::kRows;
  if (name == "grid") return TemplateKind::kGrid;
  if (name == "edges") return TemplateKind::kEdges;
  throw Error(ErrorKind::kInvalidArgument, "unknown template '" + std::string(name) + "'");
}

std::string_view to_string(Provenance provenance) { return provenance_name(provenance); }

const std::vector<CategorySpec>& object_catalog() {
  static const std::vector<CategorySpec> catalog = {
      {"can", 0.07, 0.07},    {"cup", 0.08, 0.08},   {"bowl", 0.12, 0.12},
      {"book", 0.12, 0.16},   {"box", 0.10, 0.07},   {"bottle", 0.06, 0.06},
      {"fork", 0.03, 0.15},   {"spoon", 0.04, 0.14}, {"apple", 0.07, 0.07},
      {"marker", 0.03, 0.12}, {"snack", 0.09, 0.05}, {"plate", 0.15, 0.15},
  };
  return catalog;
}

std::vector<ObjectSpec> sample_roster(const RosterConfig& config, Rng& rng) {
  const auto& catalog = object_catalog();
  if (config.min_categories < 1 || config.max_categories < config.min_categories ||
      static_cast<std::size_t>(config.max_categories) > catalog.size() ||
      config.max_objects < config.min_objects ||
      config.min_objects < 2 * config.max_categories) {
    throw Error(ErrorKind::kInvalidArgument, "roster bounds are inconsistent");
  }
  const int n_objects =
      config.min_objects + static_cast<int>(rng.index(config.max_objects - config.min_objects + 1));
  const int n_categories = config.min_categories + static_cast<int>(rng.index(
                                                       config.max_categories -
                                                       config.min_categories + 1));
  std::vector<std::size_t> order(catalog.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);

  std::vector<int> counts(n_categories, 2);
  for (int extra = n_objects - 2 * n_categories; extra > 0; --extra) {
    ++counts[rng.index(static_cast<std::size_t>(n_categories))];
  }
  std::vector<int> ids(n_objects);
  for (int i = 0; i < n_objects; ++i) ids[i] = i;
  for (int i = n_objects - 1; i > 0; --i) {
    std::swap(ids[i], ids[rng.index(static_cast<std::size_t>(i + 1))]);
  }

  std::vector<ObjectSpec> roster;
  int next = 0;
  for (int c = 0; c < n_categories; ++c) {
    const CategorySpec& spec = catalog[order[c]];
    for (int k = 0; k < counts[c]; ++k) {
      roster.push_back({make_object_id(ids[next++]), spec.name, spec.width, spec.depth});
    }
  }
  return roster;
}

SceneState make_tidy_scene(TemplateKind kind, std::span<const ObjectSpec> roster, Rng& rng,
                           double table_width, double table_depth) {
  if (roster.empty()) return new_scene(table_width, table_depth);
  const std::vector<Group> groups = group_by_category(roster);
  for (int attempt = 0; attempt < kTemplateRetries; ++attempt) {
    try {
      std::optional<SceneState> scene;
      switch (kind) {
        case TemplateKind::kRows: scene = try_rows(groups, rng, table_width, table_depth); break;
        case TemplateKind::kGrid: scene = try_grid(groups, rng, table_width, table_depth); break;
        case TemplateKind::kEdges: scene = try_edges(groups, rng, table_width, table_depth); break;
      }
      if (scene) return *std::move(scene);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kPlacementRejected) throw;
    }
  }
  throw Error(ErrorKind::kLayoutInfeasible,
              std::string(to_string(kind)) + " layout does not fit the roster of " +
                  std::to_string(roster.size()) + " objects");
}

Trajectory global_walk(const SceneState& tidy_scene, int steps, Rng& rng) {
  Trajectory trajectory;
  trajectory.states.push_back(tidy_scene);
  if (tidy_scene.empty()) return trajectory;
  for (int t = 1; t <= steps; ++t) {
    const SceneState& current = trajectory.states.back();
    std::optional<SceneState> next;
    std::string moved;
    for (int pick = 0; pick <= kWalkObjectRepicks && !next; ++pick) {
      const Placement& chosen = current.placements()[rng.index(current.size())];
      next = relocate(current, chosen.object, rng);
      moved = chosen.object.id;
    }
    if (!next) break;  // truncated walk
    trajectory.states.push_back(*std::move(next));
    trajectory.moved_ids.push_back(moved);
  }
  return trajectory;
}

void local_disturb(Trajectory& trajectory, int variants, Rng& rng) {
  trajectory.local_variants.assign(trajectory.moved_ids.size(), {});
  if (variants <= 0) return;
  for (std::size_t step = 0; step < trajectory.moved_ids.size(); ++step) {
    const SceneState& parent = trajectory.states[step];
    const Placement* target = parent.find(trajectory.moved_ids[step]);
    if (target == nullptr) continue;
    for (int v = 0; v < variants; ++v) {
      for (int attempt = 0; attempt < kVariantTries; ++attempt) {
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double magnitude = rng.uniform(kMinDisplacement, kMaxDisplacement);
        const double x = target->x + magnitude * std::cos(angle);
        const double y = target->y + magnitude * std::sin(angle);
        if (collision_free(parent, target->object, x, y)) {
          trajectory.local_variants[step].push_back(place(parent, target->object, x, y));
          break;
        }
      }
    }
  }
}

SceneState scatter_objects(const SceneState& scene, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "scatter fraction must be in [0, 1]");
  }
  std::vector<Placement> order = scene.canonical_placements();
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  const auto count = static_cast<std::size_t>(std::llround(fraction * order.size()));
  SceneState out = scene;
  for (std::size_t i = 0; i < count; ++i) {
    if (auto moved = relocate(out, order[i].object, rng)) out = *std::move(moved);
  }
  return out;
}

SceneState make_evaluation_scene(std::uint64_t seed, const RosterConfig& roster) {
  Rng rng(seed);
  constexpr TemplateKind kKinds[] = {TemplateKind::kRows, TemplateKind::kGrid};
  constexpr int kRosterDraws = 10;
  for (int draw = 0;; ++draw) {
    const std::vector<ObjectSpec> objects = sample_roster(roster, rng);
    try {
      const SceneState tidy = make_tidy_scene(kKinds[rng.index(2)], objects, rng);
      return scatter_objects(tidy, 0.5, rng);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kLayoutInfeasible || draw + 1 >= kRosterDraws) throw;
    }
  }
}

std::string state_scene_id(int trajectory, int t) {
  return "t" + std::to_string(trajectory) + "_s" + std::to_string(t);
}

std::string variant_scene_id(int trajectory, int t, int j) {
  return "t" + std::to_string(trajectory) + "_v" + std::to_string(t) + "_" + std::to_string(j);
}

std::vector<std::pair<int, int>> global_schedule(int length) {
  std::vector<std::pair<int, int>> pairs;
  const int last = length - 1;
  for (int t = 0; t < length; ++t) {
    const int base = std::max(1, t / 3);
    for (int g : {base, 2 * base, 4 * base}) {
      if (t + g <= last) pairs.emplace_back(t, t + g);
    }
  }
  return pairs;
}

std::vector<PreferencePair> select_pairs(const Trajectory& trajectory, int trajectory_id) {
  std::vector<PreferencePair> pairs;
  for (const auto& [a, b] : global_schedule(static_cast<int>(trajectory.length()))) {
    pairs.push_back({state_scene_id(trajectory_id, a), state_scene_id(trajectory_id, b),
                     Provenance::kGlobal, trajectory_id, a, b});
  }
  for (std::size_t step = 0; step < trajectory.local_variants.size(); ++step) {
    const int t = static_cast<int>(step) + 1;
    for (std::size_t j = 0; j < trajectory.local_variants[step].size(); ++j) {
      pairs.push_back({state_scene_id(trajectory_id, t - 1),
                       variant_scene_id(trajectory_id, t, static_cast<int>(j)),
                       Provenance::kLocal, trajectory_id, t - 1, t});
    }
  }
  return pairs;
}

void validate(const DatasetMeta& meta) {
  if (meta.format_version != 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "unsupported dataset version " + std::to_string(meta.format_version));
  }
  if (meta.trajectory_count < 0 || meta.walk_steps < 1 || meta.variants_per_step < 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "trajectory count and variants must be >= 0 and walk steps >= 1");
  }
  if (meta.templates.empty()) throw Error(ErrorKind::kInvalidArgument, "no templates given");
  if (!(meta.table_width > 0.0) || !(meta.table_depth > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "table dimensions must be positive");
  }
  const RosterConfig& r = meta.roster;
  if (r.min_categories < 1 || r.max_categories < r.min_categories ||
      r.max_objects < r.min_objects || r.min_objects < 2 * r.max_categories ||
      static_cast<std::size_t>(r.max_categories) > object_catalog().size()) {
    throw Error(ErrorKind::kInvalidArgument, "roster bounds are inconsistent");
  }
}

Trajectory generate_trajectory(const DatasetMeta& meta, int index) {
  Rng rng(split_seed(meta.master_seed, static_cast<std::uint64_t>(index)));
  // A few roster redraws cover rosters that one template cannot hold.
  constexpr int kRosterDraws = 10;
  for (int draw = 0;; ++draw) {
    const std::vector<ObjectSpec> roster = sample_roster(meta.roster, rng);
    const TemplateKind kind = meta.templates[rng.index(meta.templates.size())];
    try {
      const SceneState tidy =
          make_tidy_scene(kind, roster, rng, meta.table_width, meta.table_depth);
      Trajectory trajectory = global_walk(tidy, meta.walk_steps, rng);
      local_disturb(trajectory, meta.variants_per_step, rng);
      return trajectory;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kLayoutInfeasible || draw + 1 >= kRosterDraws) throw;
    }
  }
}

const SceneState& Dataset::scene(const std::string& id) const {
  auto it = scenes.find(id);
  if (it == scenes.end()) throw Error(ErrorKind::kDanglingReference, "unknown scene '" + id + "'");
  return it->second;
}

Dataset generate_dataset(const DatasetMeta& meta, int workers) {
  validate(meta);
  const int n = meta.trajectory_count;
  std::vector<Trajectory> trajectories(n);
  workers = std::clamp(workers, 1, std::max(1, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) trajectories[i] = generate_trajectory(meta, i);
  } else {
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < n; i += workers) trajectories[i] = generate_trajectory(meta, i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  Dataset dataset;
  dataset.meta = meta;
  for (int i = 0; i < n; ++i) {
    const Trajectory& tr = trajectories[i];
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
      const std::string id = state_scene_id(i, static_cast<int>(t));
      dataset.scene_ids.push_back(id);
      dataset.scenes.emplace(id, tr.states[t]);
    }
    for (std::size_t step = 0; step < tr.local_variants.size(); ++step) {
      for (std::size_t j = 0; j < tr.local_variants[step].size(); ++j) {
        const std::string id =
            variant_scene_id(i, static_cast<int>(step) + 1, static_cast<int>(j));
        dataset.scene_ids.push_back(id);
        dataset.scenes.emplace(id, tr.local_variants[step][j]);
      }
    }
    std::vector<PreferencePair> pairs = select_pairs(tr, i);
    dataset.pairs.insert(dataset.pairs.end(), pairs.begin(), pairs.end());
  }
  return dataset;
}

DatasetFiles serialize_dataset(const Dataset& dataset) {
  DatasetFiles files;
  files.meta_json = meta_to_json(dataset.meta).dump(2) + "\n";
  std::string scenes;
  for (const std::string& id : dataset.scene_ids) {
    const Json line = {{"scene_id", id}, {"scene", scene_to_json_value(dataset.scene(id))}};
    scenes += line.dump();
    scenes += '\n';
  }
  files.scenes_jsonl = std::move(scenes);
  std::string pairs;
  for (const PreferencePair& p : dataset.pairs) {
    const Json line = {{"tidier", p.tidier},
                       {"messier", p.messier},
                       {"provenance", provenance_name(p.provenance)},
                       {"trajectory", p.trajectory},
                       {"t_tidier", p.t_tidier},
                       {"t_messier", p.t_messier}};
    pairs += line.dump();
    pairs += '\n';
  }
  files.pairs_jsonl = std::move(pairs);
  return files;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  const DatasetFiles files = serialize_dataset(dataset);
  write_file(dir / "meta.json", files.meta_json);
  if (dataset.meta.trajectory_count > 0) {
    write_file(dir / "scenes.jsonl", files.scenes_jsonl);
    write_file(dir / "pairs.jsonl", files.pairs_jsonl);
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset dataset;
  std::size_t line_no = 0;
  std::string file = "meta.json";
  try {
    dataset.meta = meta_from_json(Json::parse(read_file(dir / file)));
    validate(dataset.meta);
    if (dataset.meta.trajectory_count == 0) return dataset;

    file = "scenes.jsonl";
    std::istringstream scenes(read_file(dir / file));
    std::string line;
    while (std::getline(scenes, line)) {
      ++line_no;
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      std::string id = j.at("scene_id").get<std::string>();
      SceneState scene = scene_from_json_value(j.at("scene"));
      if (!dataset.scenes.emplace(id, std::move(scene)).second) {
        throw Error(ErrorKind::kIoError, "duplicate scene id " + id);
      }
      dataset.scene_ids.push_back(std::move(id));
    }

    file = "pairs.jsonl";
    line_no = 0;
    std::istringstream pairs(read_file(dir / file));
    while (std::getline(pairs, line)) {
      ++line_no;
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      PreferencePair p;
      p.tidier = j.at("tidier").get<std::string>();
      p.messier = j.at("messier").get<std::string>();
      const std::string prov = j.at("provenance").get<std::string>();
      if (prov == "global") {
        p.provenance = Provenance::kGlobal;
      } else if (prov == "local") {
        p.provenance = Provenance::kLocal;
      } else {
        throw Error(ErrorKind::kIoError, "unknown provenance '" + prov + "'");
      }
      p.trajectory = j.at("trajectory").get<int>();
      p.t_tidier = j.at("t_tidier").get<int>();
      p.t_messier = j.at("t_messier").get<int>();
      dataset.scene(p.tidier);
      dataset.scene(p.messier);
      dataset.pairs.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kIoError, (dir / file).string() + " line " + std::to_string(line_no) +
                                         ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kDanglingReference || e.kind() == ErrorKind::kIoError) throw;
    throw Error(ErrorKind::kIoError, (dir / file).string() + " line " + std::to_string(line_no) +
                                         ": " + e.what());
  }
  return dataset;
}

}  // namespace tidy
