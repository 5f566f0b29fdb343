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

#include "tidy/scene_io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scene_json.h"
#include "tidy/error.h"

namespace tidy {

Json scene_to_json_value(const SceneState& scene) {
  Json objects = Json::array();
  for (const Placement& p : scene.placements()) {
    objects.push_back({{"id", p.object.id},
                       {"category", p.object.category},
                       {"width", p.object.width},
                       {"depth", p.object.depth},
                       {"x", p.x},
                       {"y", p.y}});
  }
  return {{"table", {{"width", scene.table_width()}, {"depth", scene.table_depth()}}},
          {"objects", std::move(objects)}};
}

SceneState scene_from_json_value(const Json& doc) {
  try {
    const Json& table = doc.at("table");
    const double width = table.at("width").get<double>();
    const double depth = table.at("depth").get<double>();
    std::vector<Placement> placements;
    for (const Json& o : doc.at("objects")) {
      Placement p;
      p.object.id = o.at("id").get<std::string>();
      p.object.category = o.at("category").get<std::string>();
      p.object.width = o.at("width").get<double>();
      p.object.depth = o.at("depth").get<double>();
      p.x = o.at("x").get<double>();
      p.y = o.at("y").get<double>();
      if (p.object.width > width || p.object.depth > depth) {
        throw Error(ErrorKind::kInvalidArgument, "object " + p.object.id + " larger than table");
      }
      placements.push_back(std::move(p));
    }
    return scene_from_placements(width, depth, std::move(placements));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("bad scene document: ") + e.what());
  }
}

std::string scene_to_json(const SceneState& scene) { return scene_to_json_value(scene).dump(); }

SceneState scene_from_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into a line/column diagnostic.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::kInvalidArgument, "line " + std::to_string(line) + ", column " +
                                                 std::to_string(column) + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    // Out-of-range numbers are reported outside parse_error.
    throw Error(ErrorKind::kInvalidArgument, std::string("bad scene document: ") + e.what());
  }
  return scene_from_json_value(doc);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIoError, "read failed for " + path.string());
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

SceneState load_scene_file(const std::filesystem::path& path) {
  return scene_from_json(read_file(path));
}

void save_scene_file(const SceneState& scene, const std::filesystem::path& path) {
  write_file(path, scene_to_json(scene) + "\n");
}

}  // namespace tidy
