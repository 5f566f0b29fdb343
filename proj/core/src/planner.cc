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

#include "tidy/planner.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "tidy/error.h"

namespace tidy {
namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool is_step_number(std::string_view s) {
  if (s.size() < 2 || s.back() != '.') return false;
  s.remove_suffix(1);
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Returns an empty string on success, otherwise the reason the line is
// rejected.
std::string parse_action(std::string_view line, ActionProposal& out) {
  const auto w = split_words(line);
  if (w.size() < 5 || !is_step_number(w[0])) return "expected '<n>. PICK <object> PLACE ...'";
  if (!iequals(w[1], "PICK") || !iequals(w[3], "PLACE")) return "expected PICK ... PLACE";
  if (!is_valid_object_id(w[2])) return "malformed object id '" + std::string(w[2]) + "'";
  const std::string object(w[2]);
  if (iequals(w[4], "NEAR")) {
    if (w.size() != 6) return "NEAR takes exactly one object id";
    if (!is_valid_object_id(w[5])) return "malformed anchor id '" + std::string(w[5]) + "'";
    if (w[5] == w[2]) return "object cannot be placed near itself";
    out = ActionProposal::near(object, std::string(w[5]));
    return {};
  }
  if (iequals(w[4], "GROUP")) {
    if (w.size() != 6) return "GROUP takes exactly one name";
    out = ActionProposal::group(object, std::string(w[5]));
    return {};
  }
  if (iequals(w[4], "AT")) {
    double x = 0.0;
    double y = 0.0;
    if (w.size() != 7) return "AT takes exactly two coordinates";
    if (!parse_number(w[5], x) || !parse_number(w[6], y)) return "AT coordinates must be finite";
    out = ActionProposal::at(object, x, y);
    return {};
  }
  return "unknown target '" + std::string(w[4]) + "'";
}

constexpr std::string_view kTaskHeader =
    "You are tidying a rectangular tabletop. Rearrange the objects so the table looks\n"
    "tidy to a person: related objects together, neatly arranged, nothing in the way.\n";

constexpr std::string_view kObjectCentricGrammar =
    "Each action moves one object. Allowed actions:\n"
    "<n>. PICK obj_<k> PLACE NEAR obj_<m>   (put obj_<k> next to obj_<m>)\n"
    "<n>. PICK obj_<k> PLACE GROUP <name>   (start or join the group called <name>)\n";

constexpr std::string_view kDirectGrammar =
    "Each action moves one object to exact table coordinates. Allowed actions:\n"
    "<n>. PICK obj_<k> PLACE AT <x> <y>   (center of the object, in table units)\n";

constexpr std::string_view kOutputFormat =
    "Answer in exactly this format and nothing else:\n"
    "RULES:\n"
    "- <one organization rule per line>\n"
    "ACTIONS:\n"
    "<numbered actions, one per line>\n"
    "Write the RULES first, then the ACTIONS that follow them.\n";

}  // namespace

ActionProposal ActionProposal::near(std::string object_id, std::string anchor_id) {
  return {std::move(object_id), TargetKind::kNear, std::move(anchor_id), 0.0, 0.0};
}

ActionProposal ActionProposal::group(std::string object_id, std::string group_name) {
  return {std::move(object_id), TargetKind::kGroup, std::move(group_name), 0.0, 0.0};
}

ActionProposal ActionProposal::at(std::string object_id, double x, double y) {
  return {std::move(object_id), TargetKind::kAt, {}, x, y};
}

std::string_view to_string(PromptMode mode) {
  return mode == PromptMode::kObjectCentric ? "object-centric" : "direct";
}

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "object-centric") return PromptMode::kObjectCentric;
  if (text == "direct") return PromptMode::kDirectCoordinates;
  throw Error(ErrorKind::kInvalidArgument, "unknown prompt mode '" + std::string(text) + "'");
}

std::string describe_scene(const SceneState& scene) {
  std::string out = "table: width=" + fixed3(scene.table_width()) +
                    ", depth=" + fixed3(scene.table_depth()) + "\n";
  for (const Placement& p : scene.canonical_placements()) {
    out += p.object.id + ": category=" + p.object.category + ", size=" + fixed3(p.object.width) +
           "x" + fixed3(p.object.depth) + ", at=(" + fixed3(p.x) + "," + fixed3(p.y) + ")\n";
  }
  return out;
}

std::string build_prompt(std::string_view description, PromptMode mode,
                         const std::vector<std::string>& sample_solutions) {
  if (sample_solutions.size() > 2) {
    throw Error(ErrorKind::kInvalidArgument, "at most two sample solutions are allowed");
  }
  std::string out(kTaskHeader);
  out += "Coordinates are in table units; x runs along the width from the left edge and\n";
  out += "y along the depth from the near edge. Objects must stay fully on the table and\n";
  out += "must not overlap.\n\n";
  out += mode == PromptMode::kObjectCentric ? kObjectCentricGrammar : kDirectGrammar;
  out += "\n";
  out += kOutputFormat;
  out += "\nScene:\n";
  out += description;
  if (!description.empty() && description.back() != '\n') out += "\n";
  if (!sample_solutions.empty()) {
    out += "\nExample solutions for other scenes:\n";
    for (std::size_t i = 0; i < sample_solutions.size(); ++i) {
      out += "Example " + std::to_string(i + 1) + ":\n" + sample_solutions[i];
      if (sample_solutions[i].empty() || sample_solutions[i].back() != '\n') out += "\n";
    }
  }
  return out;
}

PlanProposal parse_plan(std::string_view text, std::vector<std::string>* diagnostics) {
  enum class Section { kNone, kRules, kActions };
  Section section = Section::kNone;
  bool saw_rules = false;
  bool saw_actions = false;
  PlanProposal plan;
  std::vector<std::string> notes;
  auto note = [&](std::size_t line_no, const std::string& why) {
    notes.push_back("line " + std::to_string(line_no) + ": " + why);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (iequals(line, "RULES:")) {
      if (saw_rules) {
        note(line_no, "duplicate RULES section");
      } else if (saw_actions) {
        note(line_no, "RULES section after ACTIONS");
      } else {
        saw_rules = true;
        section = Section::kRules;
      }
      continue;
    }
    if (iequals(line, "ACTIONS:")) {
      if (saw_actions) {
        note(line_no, "duplicate ACTIONS section");
      } else if (!saw_rules) {
        note(line_no, "ACTIONS section before RULES");
      } else {
        saw_actions = true;
        section = Section::kActions;
      }
      continue;
    }

    switch (section) {
      case Section::kNone:
        note(line_no, "text outside RULES/ACTIONS sections");
        break;
      case Section::kRules: {
        if (line.front() != '-') {
          note(line_no, "rule lines must start with '-'");
          break;
        }
        const std::string_view rule = trim(line.substr(1));
        if (rule.empty()) {
          note(line_no, "empty rule");
        } else {
          plan.rules.emplace_back(rule);
        }
        break;
      }
      case Section::kActions: {
        ActionProposal action;
        const std::string why = parse_action(line, action);
        if (why.empty()) {
          plan.actions.push_back(std::move(action));
        } else {
          note(line_no, why);
        }
        break;
      }
    }
  }

  if (diagnostics != nullptr) diagnostics->insert(diagnostics->end(), notes.begin(), notes.end());
  auto fail = [&](const std::string& why) {
    std::string detail = why;
    for (const std::string& n : notes) detail += "; " + n;
    throw Error(ErrorKind::kParseFailure, detail);
  };
  if (!saw_rules) fail("missing RULES section");
  if (!saw_actions) fail("missing ACTIONS section");
  if (plan.rules.empty()) fail("no rules");
  if (plan.actions.empty()) fail("no valid actions");
  return plan;
}

std::string serialize_plan(const PlanProposal& plan) {
  std::string out = "RULES:\n";
  for (const std::string& rule : plan.rules) out += "- " + rule + "\n";
  out += "ACTIONS:\n";
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const ActionProposal& a = plan.actions[i];
    out += std::to_string(i + 1) + ". PICK " + a.object_id + " PLACE ";
    switch (a.kind) {
      case TargetKind::kNear:
        out += "NEAR " + a.anchor;
        break;
      case TargetKind::kGroup:
        out += "GROUP " + a.anchor;
        break;
      case TargetKind::kAt:
        out += "AT " + shortest(a.x) + " " + shortest(a.y);
        break;
    }
    out += "\n";
  }
  return out;
}

PlanProposal fallback_plan(const SceneState& scene) {
  if (scene.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot plan for an empty scene");
  std::map<std::string, std::vector<std::string>> groups;
  for (const Placement& p : scene.canonical_placements()) {
    groups[p.object.category].push_back(p.object.id);
  }
  std::vector<const std::pair<const std::string, std::vector<std::string>>*> order;
  for (const auto& g : groups) order.push_back(&g);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->second.size() > b->second.size();
  });

  PlanProposal plan;
  plan.rules.push_back("group objects by category");
  for (const auto* g : order) {
    const std::vector<std::string>& ids = g->second;
    plan.actions.push_back(ActionProposal::group(ids.front(), g->first));
    for (std::size_t i = 1; i < ids.size(); ++i) {
      plan.actions.push_back(ActionProposal::near(ids[i], ids.front()));
    }
  }
  return plan;
}

}  // namespace tidy
