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

#ifndef TIDY_SCENE_IO_H_
#define TIDY_SCENE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "tidy/scene.h"

namespace tidy {

// Compact single-line JSON document:
// {"table":{"width":..,"depth":..},"objects":[{"id","category","width","depth","x","y"},...]}
std::string scene_to_json(const SceneState& scene);

// Parses and validates a scene document. Syntax errors and invariant
// violations throw kInvalidArgument; the message names the line and column
// for syntax errors.
SceneState scene_from_json(std::string_view text);

SceneState load_scene_file(const std::filesystem::path& path);
void save_scene_file(const SceneState& scene, const std::filesystem::path& path);

// Whole-file helpers; throw kIoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tidy

#endif  // TIDY_SCENE_IO_H_
