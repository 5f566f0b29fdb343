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

#include "tidy/oracle.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace tidy {
namespace {

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

}  // namespace

DisorderReport disorder(const SceneState& scene) {
  // Group members in canonical order so the sums do not depend on the
  // placement list order.
  std::map<std::string, std::vector<Placement>> groups;
  for (const Placement& p : scene.canonical_placements()) groups[p.object.category].push_back(p);

  DisorderReport report;
  std::vector<Box> boxes;
  for (const auto& [category, members] : groups) {
    // Group extent is the AABB of member centers, so a straight row is a
    // zero-area box and never counts as overlapping.
    Box box{members.front().x, members.front().y, members.front().x, members.front().y};
    for (const Placement& m : members) {
      box.min_x = std::min(box.min_x, m.x);
      box.min_y = std::min(box.min_y, m.y);
      box.max_x = std::max(box.max_x, m.x);
      box.max_y = std::max(box.max_y, m.y);
    }
    boxes.push_back(box);
    if (members.size() < 2) continue;

    std::vector<double> xs;
    std::vector<double> ys;
    double extent = 0.0;
    for (const Placement& m : members) {
      xs.push_back(m.x);
      ys.push_back(m.y);
      extent += m.object.max_extent();
    }
    report.alignment += std::min(variance(xs), variance(ys));

    double distance = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        distance += std::hypot(members[i].x - members[j].x, members[i].y - members[j].y);
        ++pairs;
      }
    }
    const double spread = distance / static_cast<double>(pairs);
    const double ideal =
        static_cast<double>(members.size() - 1) * extent / static_cast<double>(members.size());
    report.spread_excess += std::max(0.0, spread - ideal);
  }

  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const double smaller = std::min(boxes[i].area(), boxes[j].area());
      if (smaller <= 0.0) continue;
      report.intergroup_overlap += intersection_area(boxes[i], boxes[j]) / smaller;
    }
  }

  report.total = kAlignmentWeight * report.alignment + kSpreadWeight * report.spread_excess +
                 kOverlapWeight * report.intergroup_overlap;
  return report;
}

}  // namespace tidy
