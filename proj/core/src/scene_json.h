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

#ifndef TIDY_SRC_SCENE_JSON_H_
#define TIDY_SRC_SCENE_JSON_H_

// Internal: JSON views of scenes shared by the scene, dataset and grounding
// writers. Insertion-ordered so documents keep the documented key order.
// Not installed.

#include "json.hpp"
#include "tidy/scene.h"

namespace tidy {

using Json = nlohmann::ordered_json;

Json scene_to_json_value(const SceneState& scene);
SceneState scene_from_json_value(const Json& doc);

}  // namespace tidy

#endif  // TIDY_SRC_SCENE_JSON_H_
