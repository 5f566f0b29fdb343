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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tidy/checkpoint.h"
#include "tidy/datagen.h"
#include "tidy/grounding.h"
#include "tidy/llm.h"
#include "tidy/oracle.h"
#include "tidy/planner.h"
#include "tidy/raster.h"
#include "tidy/scene_io.h"
#include "tidy/trainer.h"

namespace tidy::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kManifestVersion = 1;

struct GenDataOptions {
  std::string out;
  int trajectories = 300;
  int steps = 12;
  int local = 4;
  std::uint64_t seed = 0;
  std::vector<std::string> templates = {"rows", "grid"};
  int min_objects = 8;
  int max_objects = 12;
  int min_categories = 2;
  int max_categories = 3;
  int workers = 1;
};

struct TrainOptions {
  std::string data;
  std::string out;
  std::string metrics;
  std::string encoder = "features";
  double lr = 1e-3;
  int batch = 64;
  int epochs = 50;
  int patience = 5;
  double val_fraction = 0.15;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct EvalOptions {
  std::string data;
  std::string ckpt;
  std::string encoder;
  std::string out;
  double val_fraction = 0.15;
  std::uint64_t seed = 0;
};

struct TidyOptions {
  std::string scene;
  std::string ckpt;
  std::string out;
  std::string planner = "rules";
  std::string mode = "object-centric";
  std::string grounding = "score";
  int samples = 64;
  double sigma_initial = 1.5;
  double sigma_growth = 1.5;
  int max_attempts = 512;
  std::uint64_t seed = 0;
  std::vector<std::string> demos;
  LlmConfig llm;
};

struct RenderOptions {
  std::string scene;
  std::string out;
};

// Usage problems detected after flag parsing.
[[noreturn]] void usage(const std::string& why) {
  throw Error(ErrorKind::kInvalidArgument, why);
}

void ensure_parent(const fs::path& file) {
  if (!file.has_parent_path()) return;
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (ec) {
    throw Error(ErrorKind::kIoError,
                "cannot create directory '" + file.parent_path().string() + "': " + ec.message());
  }
}

void write_output(const fs::path& path, std::string_view bytes) {
  ensure_parent(path);
  write_file(path, bytes);
}

void write_manifest(const fs::path& path, std::string_view command, Json config,
                    std::uint64_t seed, const std::vector<fs::path>& artifacts) {
  Json paths = Json::array();
  for (const fs::path& p : artifacts) paths.push_back(p.string());
  const Json manifest = {{"format_version", kManifestVersion},
                         {"command", command},
                         {"config", std::move(config)},
                         {"seed", seed},
                         {"artifacts", std::move(paths)}};
  write_output(path, manifest.dump(2) + "\n");
}

Json disorder_json(const DisorderReport& d) {
  return {{"alignment", d.alignment},
          {"spread_excess", d.spread_excess},
          {"intergroup_overlap", d.intergroup_overlap},
          {"total", d.total}};
}

Json metric_json(const PairMetric& m) {
  return m.value ? Json(*m.value) : Json(nullptr);
}

// ---------------------------------------------------------------- commands

int cmd_gen_data(const GenDataOptions& o, std::ostream& out) {
  DatasetMeta meta;
  meta.master_seed = o.seed;
  meta.trajectory_count = o.trajectories;
  meta.walk_steps = o.steps;
  meta.variants_per_step = o.local;
  meta.templates.clear();
  for (const std::string& t : o.templates) meta.templates.push_back(parse_template_kind(t));
  meta.roster = {o.min_objects, o.max_objects, o.min_categories, o.max_categories};
  validate(meta);
  if (o.workers < 1) usage("--workers must be >= 1");

  const Dataset dataset = generate_dataset(meta, o.workers);
  const fs::path dir = o.out;
  save_dataset(dataset, dir);

  std::vector<fs::path> artifacts = {dir / "meta.json"};
  if (meta.trajectory_count > 0) {
    artifacts.push_back(dir / "scenes.jsonl");
    artifacts.push_back(dir / "pairs.jsonl");
  }
  const Json config = {{"out", o.out},         {"trajectories", o.trajectories},
                       {"steps", o.steps},     {"local", o.local},
                       {"seed", o.seed},       {"templates", o.templates},
                       {"min-objects", o.min_objects}, {"max-objects", o.max_objects},
                       {"min-categories", o.min_categories},
                       {"max-categories", o.max_categories}, {"workers", o.workers}};
  write_manifest(dir / "manifest.json", "gen-data", config, o.seed, artifacts);
  out << "wrote " << dataset.scene_ids.size() << " scenes and " << dataset.pairs.size()
      << " pairs to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
  TrainConfig config;
  config.encoder = parse_encoder_kind(o.encoder);
  config.learning_rate = o.lr;
  config.batch_size = o.batch;
  config.max_epochs = o.epochs;
  config.early_stop_patience = o.patience;
  config.val_fraction = o.val_fraction;
  config.seed = o.seed;
  config.threads = o.threads;
  validate(config);

  const Dataset dataset = load_dataset(o.data);
  const TrainResult result = train(config, dataset);

  const fs::path ckpt = o.out;
  const fs::path metrics_path =
      o.metrics.empty() ? ckpt.parent_path() / "metrics.json" : fs::path(o.metrics);
  ensure_parent(ckpt);
  save_checkpoint(result.model, ckpt);

  Json epochs = Json::array();
  for (const EpochMetrics& m : result.history) {
    epochs.push_back(
        {{"epoch", m.epoch}, {"train_loss", m.train_loss}, {"val_accuracy", m.val_accuracy}});
  }
  const Json metrics = {{"encoder", o.encoder},
                        {"best_epoch", result.best_epoch},
                        {"train_trajectories", result.split.train_trajectories.size()},
                        {"val_trajectories", result.split.val_trajectories.size()},
                        {"epochs", std::move(epochs)}};
  write_output(metrics_path, metrics.dump(2) + "\n");

  const Json cfg = {{"data", o.data},       {"out", o.out},
                    {"metrics", metrics_path.string()},
                    {"encoder", o.encoder}, {"lr", o.lr},
                    {"batch", o.batch},     {"epochs", o.epochs},
                    {"patience", o.patience}, {"val-fraction", o.val_fraction},
                    {"seed", o.seed},       {"threads", o.threads}};
  write_manifest(fs::path(o.out + ".manifest.json"), "train", cfg, o.seed,
                 {ckpt, metrics_path});
  const double best = result.history[static_cast<std::size_t>(result.best_epoch - 1)].val_accuracy;
  out << "trained " << result.history.size() << " epochs; best epoch " << result.best_epoch
      << " val accuracy " << best << "\n";
  return kExitOk;
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const ScorerModel model = load_checkpoint(o.ckpt);
  if (!o.encoder.empty() && parse_encoder_kind(o.encoder) != model.encoder) {
    throw Error(ErrorKind::kCorruptCheckpoint,
                "checkpoint encoder is " + std::string(to_string(model.encoder)) +
                    ", expected " + o.encoder);
  }
  if (!(o.val_fraction > 0.0 && o.val_fraction < 1.0)) usage("--val-fraction must be in (0, 1)");
  const Dataset dataset = load_dataset(o.data);
  if (dataset.pairs.empty()) usage("dataset has no pairs");
  const DatasetSplit split = split_by_trajectory(dataset, o.val_fraction, o.seed);
  const std::vector<PreferencePair> held_out = pairs_in(dataset, split, true);
  const SceneInputs inputs(dataset, model.encoder);
  const EvalReport r = evaluate(model, dataset, held_out, inputs);

  const Json report = {
      {"checkpoint", o.ckpt},
      {"encoder", to_string(model.encoder)},
      {"split_seed", o.seed},
      {"val_fraction", o.val_fraction},
      {"val_trajectories", split.val_trajectories.size()},
      {"pairs",
       {{"overall", r.overall.count},
        {"global", r.global.count},
        {"local", r.local.count},
        {"gap_1", r.gap_1.count},
        {"gap_2", r.gap_2.count},
        {"gap_3plus", r.gap_3plus.count}}},
      {"accuracy",
       {{"overall", metric_json(r.overall)},
        {"global", metric_json(r.global)},
        {"local", metric_json(r.local)},
        {"gap_1", metric_json(r.gap_1)},
        {"gap_2", metric_json(r.gap_2)},
        {"gap_3plus", metric_json(r.gap_3plus)}}},
      {"oracle_agreement",
       {{"gap_3plus", metric_json(r.oracle_agreement_gap_3plus)},
        {"gap_3plus_pairs", r.oracle_agreement_gap_3plus.count},
        {"all", metric_json(r.oracle_agreement_all)},
        {"all_pairs", r.oracle_agreement_all.count}}}};
  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_output(o.out, text);
    const Json cfg = {{"data", o.data},       {"ckpt", o.ckpt}, {"encoder", o.encoder},
                      {"out", o.out},         {"val-fraction", o.val_fraction},
                      {"seed", o.seed}};
    write_manifest(fs::path(o.out + ".manifest.json"), "eval", cfg, o.seed, {fs::path(o.out)});
    out << "wrote " << o.out << "\n";
  }
  return kExitOk;
}

int cmd_tidy(const TidyOptions& o, std::ostream& out, std::ostream& err) {
  const bool use_llm = o.planner == "llm";
  if (!use_llm && o.planner != "rules") usage("--planner must be 'llm' or 'rules'");
  const PromptMode mode = parse_prompt_mode(o.mode);
  if (!use_llm && mode != PromptMode::kObjectCentric) {
    usage("--mode direct needs --planner llm; the rules planner is object-centric");
  }
  GroundingConfig grounding;
  grounding.strategy = parse_grounding_strategy(o.grounding);
  grounding.samples = o.samples;
  grounding.sigma_initial_factor = o.sigma_initial;
  grounding.sigma_growth = o.sigma_growth;
  grounding.max_attempts = o.max_attempts;
  grounding.seed = o.seed;
  validate(grounding);
  if (grounding.strategy == GroundingStrategy::kScore && o.ckpt.empty()) {
    usage("--grounding score needs --ckpt");
  }
  if (o.demos.size() > 2) usage("at most two --demo files");

  const SceneState scene = load_scene_file(o.scene);
  std::optional<ScorerModel> model;
  if (!o.ckpt.empty()) model = load_checkpoint(o.ckpt);

  const fs::path dir = o.out;
  std::vector<fs::path> artifacts;
  PlanProposal plan;
  int llm_retries = 0;
  if (use_llm) {
    std::vector<std::string> demos;
    for (const std::string& d : o.demos) demos.push_back(read_file(d));
    const std::string prompt = build_prompt(describe_scene(scene), mode, demos);
    write_output(dir / "prompt.txt", prompt);
    artifacts.push_back(dir / "prompt.txt");
    const LlmCompletion completion = llm_complete(o.llm, prompt);
    llm_retries = completion.retries;
    write_output(dir / "llm_response.txt", completion.text);
    artifacts.push_back(dir / "llm_response.txt");
    std::vector<std::string> diagnostics;
    plan = parse_plan(completion.text, &diagnostics);
    for (const std::string& d : diagnostics) err << "plan: skipped " << d << "\n";
  } else {
    plan = fallback_plan(scene);
  }

  const EpisodeResult episode = tidy_episode(scene, plan, model ? &*model : nullptr, grounding);
  const DisorderReport before = disorder(scene);
  const DisorderReport after = disorder(episode.final_scene);

  auto emit = [&](const std::string& name, std::string_view bytes) {
    write_output(dir / name, bytes);
    artifacts.push_back(dir / name);
  };
  emit("proposal.txt", serialize_plan(plan));
  emit("plan.json", episode_plan_json(episode));
  emit("trace.jsonl", episode_trace_jsonl(episode));
  emit("before.ppm", to_ppm(scene));
  emit("after.ppm", to_ppm(episode.final_scene));
  emit("final_scene.json", scene_to_json(episode.final_scene));

  Json report = {{"planner", o.planner},
                 {"mode", to_string(mode)},
                 {"grounding", to_string(grounding.strategy)},
                 {"seed", o.seed},
                 {"rules", plan.rules},
                 {"proposed_actions", plan.actions.size()},
                 {"applied_actions", episode.actions.size()},
                 {"skipped_actions", episode.skipped.size()},
                 {"disorder_before", disorder_json(before)},
                 {"disorder_after", disorder_json(after)}};
  if (use_llm) report["llm_retries"] = llm_retries;
  emit("report.json", report.dump(2) + "\n");

  Json cfg = {{"scene", o.scene},
              {"ckpt", o.ckpt},
              {"out", o.out},
              {"planner", o.planner},
              {"mode", o.mode},
              {"grounding", o.grounding},
              {"samples", o.samples},
              {"sigma-initial", o.sigma_initial},
              {"sigma-growth", o.sigma_growth},
              {"max-attempts", o.max_attempts},
              {"seed", o.seed},
              {"demo", o.demos}};
  if (use_llm) {
    cfg["llm-url"] = o.llm.base_url;
    cfg["llm-model"] = o.llm.model_name;
    cfg["api-key-env"] = o.llm.api_key_env;
    cfg["llm-timeout"] = o.llm.timeout_seconds;
    cfg["llm-retries"] = o.llm.max_retries;
    cfg["llm-temperature"] = o.llm.temperature;
    cfg["llm-backoff"] = o.llm.backoff_base_seconds;
  }
  write_manifest(dir / "manifest.json", "tidy", cfg, o.seed, artifacts);
  out << "applied " << episode.actions.size() << " of " << plan.actions.size()
      << " actions; disorder " << before.total << " -> " << after.total << "\n";
  return kExitOk;
}

int cmd_render(const RenderOptions& o, std::ostream& out) {
  const SceneState scene = load_scene_file(o.scene);
  write_output(o.out, to_ppm(scene));
  const Json cfg = {{"scene", o.scene}, {"out", o.out}};
  write_manifest(fs::path(o.out + ".manifest.json"), "render", cfg, 0, {fs::path(o.out)});
  out << "wrote " << o.out << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- config merge

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  for (const std::string& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::string scalar_token(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw Error(ErrorKind::kConfigError, "config key '" + key + "' must be a scalar or array");
}

// Turns `--config file.json` into leading flag tokens. Keys are long flag
// names without dashes; keys also given on the command line are dropped so
// explicit flags always win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error(ErrorKind::kInvalidArgument, "--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;

  std::string text;
  try {
    text = read_file(*path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfigError, e.detail());
  }
  const Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::kConfigError, "config '" + *path + "' is not a JSON object");
  }
  std::vector<std::string> merged;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (flag_given(rest, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) merged.push_back(flag);
    } else if (value.is_array()) {
      for (const Json& v : value) {
        merged.push_back(flag);
        merged.push_back(scalar_token(v, key));
      }
    } else {
      merged.push_back(flag);
      merged.push_back(scalar_token(value, key));
    }
  }
  merged.insert(merged.end(), rest.begin(), rest.end());
  return merged;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIoError:
    case ErrorKind::kCorruptCheckpoint:
    case ErrorKind::kDanglingReference:
      return kExitIo;
    case ErrorKind::kLayoutInfeasible:
    case ErrorKind::kGroundingInfeasible:
    case ErrorKind::kCapacityExceeded:
      return kExitInfeasible;
    case ErrorKind::kLlmUnavailable:
    case ErrorKind::kLlmError:
    case ErrorKind::kParseFailure:
      return kExitLlm;
    default:
      return kExitUsage;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tabletop tidying: dataset generation, scorer training and planning", "tidy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tidy 0.1.0");

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a preference dataset");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--trajectories", gen.trajectories, "Number of random walks");
  gen_cmd->add_option("--steps", gen.steps, "Global walk steps per trajectory");
  gen_cmd->add_option("--local", gen.local, "Local variants per step");
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--templates", gen.templates, "Tidy templates: rows, grid, edges")
      ->delimiter(',');
  gen_cmd->add_option("--min-objects", gen.min_objects);
  gen_cmd->add_option("--max-objects", gen.max_objects);
  gen_cmd->add_option("--min-categories", gen.min_categories);
  gen_cmd->add_option("--max-categories", gen.max_categories);
  gen_cmd->add_option("--workers", gen.workers, "Generation threads");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a tidiness scorer");
  train_cmd->add_option("--data", tr.data, "Dataset directory")->required();
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--metrics", tr.metrics, "Metrics JSON path (default: next to --out)");
  train_cmd->add_option("--encoder", tr.encoder, "features or cnn");
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate");
  train_cmd->add_option("--batch", tr.batch, "Mini-batch size");
  train_cmd->add_option("--epochs", tr.epochs, "Maximum epochs");
  train_cmd->add_option("--patience", tr.patience, "Early-stopping patience");
  train_cmd->add_option("--val-fraction", tr.val_fraction, "Held-out trajectory fraction");
  train_cmd->add_option("--seed", tr.seed, "Training seed");
  train_cmd->add_option("--threads", tr.threads, "Gradient threads");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Report held-out accuracy of a checkpoint");
  eval_cmd->add_option("--data", ev.data, "Dataset directory")->required();
  eval_cmd->add_option("--ckpt", ev.ckpt, "Checkpoint path")->required();
  eval_cmd->add_option("--encoder", ev.encoder, "Expected encoder; mismatch is an error");
  eval_cmd->add_option("--out", ev.out, "Report path (default: stdout)");
  eval_cmd->add_option("--val-fraction", ev.val_fraction, "Held-out fraction used in training");
  eval_cmd->add_option("--seed", ev.seed, "Seed used in training (fixes the split)");

  TidyOptions td;
  auto* tidy_cmd = app.add_subcommand("tidy", "Plan and ground a tidying episode");
  tidy_cmd->add_option("--scene", td.scene, "Scene JSON")->required();
  tidy_cmd->add_option("--ckpt", td.ckpt, "Scorer checkpoint");
  tidy_cmd->add_option("--out", td.out, "Output directory")->required();
  tidy_cmd->add_option("--planner", td.planner, "llm or rules");
  tidy_cmd->add_option("--mode", td.mode, "object-centric or direct");
  tidy_cmd->add_option("--grounding", td.grounding, "score or collision-only");
  tidy_cmd->add_option("--samples", td.samples, "Candidates per action");
  tidy_cmd->add_option("--sigma-initial", td.sigma_initial, "Initial sampling spread factor");
  tidy_cmd->add_option("--sigma-growth", td.sigma_growth, "Spread growth per 8 rejections");
  tidy_cmd->add_option("--max-attempts", td.max_attempts, "Sampling attempts per action");
  tidy_cmd->add_option("--seed", td.seed, "Grounding seed");
  tidy_cmd->add_option("--demo", td.demos, "Sample solution text file (up to 2)");
  tidy_cmd->add_option("--llm-url", td.llm.base_url, "Chat-completion base URL");
  tidy_cmd->add_option("--llm-model", td.llm.model_name, "Model name");
  tidy_cmd->add_option("--api-key-env", td.llm.api_key_env, "Environment variable with the key");
  tidy_cmd->add_option("--llm-timeout", td.llm.timeout_seconds, "Request timeout (s)");
  tidy_cmd->add_option("--llm-retries", td.llm.max_retries, "Retries on transport/5xx errors");
  tidy_cmd->add_option("--llm-temperature", td.llm.temperature, "Sampling temperature");
  tidy_cmd->add_option("--llm-backoff", td.llm.backoff_base_seconds, "First retry delay (s)");

  RenderOptions rd;
  auto* render_cmd = app.add_subcommand("render", "Render a scene to PPM");
  render_cmd->add_option("--scene", rd.scene, "Scene JSON")->required();
  render_cmd->add_option("--out", rd.out, "PPM path")->required();

  try {
    std::vector<std::string> tokens;
    if (!args.empty()) {
      tokens.push_back(args.front());
      const auto merged = expand_config({args.begin() + 1, args.end()});
      tokens.insert(tokens.end(), merged.begin(), merged.end());
    }
    // CLI11 consumes the vector from the back.
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and --version come through here with a zero code.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (tidy_cmd->parsed()) return cmd_tidy(td, out, err);
    if (render_cmd->parsed()) return cmd_render(rd, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::kLlmUnavailable) {
      err << "hint: the LLM endpoint is unreachable; use --planner rules for an offline run\n";
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tidy::cli
