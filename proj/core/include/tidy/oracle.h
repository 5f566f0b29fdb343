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

#ifndef TIDY_ORACLE_H_
#define TIDY_ORACLE_H_

#include "tidy/scene.h"

namespace tidy {

// Analytic disorder of a layout, used as an independent yardstick for tests
// and evaluation. Never used as a training signal.
struct DisorderReport {
  double alignment = 0.0;           // sum over categories of min(var x, var y)
  double spread_excess = 0.0;       // sum over categories of max(0, spread - ideal)
  double intergroup_overlap = 0.0;  // sum over category pairs of normalized center-AABB overlap
  double total = 0.0;               // 1.0 * alignment + 0.5 * spread + 2.0 * overlap
};

inline constexpr double kAlignmentWeight = 1.0;
inline constexpr double kSpreadWeight = 0.5;
inline constexpr double kOverlapWeight = 2.0;

DisorderReport disorder(const SceneState& scene);

}  // namespace tidy

#endif  // TIDY_ORACLE_H_
