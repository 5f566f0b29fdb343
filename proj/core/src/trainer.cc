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

#include "tidy/trainer.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "tidy/error.h"
#include "tidy/nn.h"
#include "tidy/oracle.h"
#include "tidy/raster.h"
#include "tidy/rng.h"

namespace tidy {
namespace {

// Child stream ids derived from TrainConfig::seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kEpochStreamBase = 1000;

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

// Two-branch gradient of one pair's loss, scaled by `weight`.
double pair_gradient(const ScorerModel& model, const PreferencePair& pair,
                     const SceneInputs& inputs, double weight, std::span<double> grads) {
  const ScorerInput a = inputs.input(pair.tidier);
  const ScorerInput b = inputs.input(pair.messier);
  const double sa = score_input(model, a);
  const double sb = score_input(model, b);
  const double diff = sa - sb;
  // d/d diff of -log sigmoid(diff) is -sigmoid(-diff).
  const double d = -nn::sigmoid(-diff) * weight;
  accumulate_gradient(model, a, d, grads);
  accumulate_gradient(model, b, -d, grads);
  return -nn::log_sigmoid(diff);
}

}  // namespace

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0) || config.batch_size < 1 || config.max_epochs < 1 ||
      config.early_stop_patience < 1 || !(config.val_fraction > 0.0) ||
      !(config.val_fraction < 1.0) || config.threads < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "training config needs positive counts and val_fraction in (0, 1)");
  }
}

SceneInputs::SceneInputs(const Dataset& dataset, EncoderKind kind)
    : dataset_(&dataset), kind_(kind) {
  if (kind == EncoderKind::kFeatures) {
    cache_.reserve(dataset.scenes.size());
    for (const auto& [id, scene] : dataset.scenes) {
      cache_.emplace(id, make_input(kind, rasterize(scene)));
    }
  }
}

ScorerInput SceneInputs::input(const std::string& scene_id) const {
  if (kind_ == EncoderKind::kFeatures) {
    auto it = cache_.find(scene_id);
    if (it == cache_.end()) {
      throw Error(ErrorKind::kDanglingReference, "unknown scene '" + scene_id + "'");
    }
    return it->second;
  }
  return make_input(kind_, rasterize(dataset_->scene(scene_id)));
}

double bt_loss(const ScorerModel& model, std::span<const PreferencePair> batch,
               const SceneInputs& inputs) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  double total = 0.0;
  for (const PreferencePair& p : batch) {
    const double diff =
        score_input(model, inputs.input(p.tidier)) - score_input(model, inputs.input(p.messier));
    total += -nn::log_sigmoid(diff);
  }
  return total / static_cast<double>(batch.size());
}

double bt_loss_gradient(const ScorerModel& model, std::span<const PreferencePair> batch,
                        const SceneInputs& inputs, std::span<double> grads, int threads) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  if (grads.size() != model.params.size()) {
    throw Error(ErrorKind::kInvalidArgument, "gradient buffer length mismatch");
  }
  const std::size_t n = batch.size();
  const std::size_t width = grads.size();
  const double weight = 1.0 / static_cast<double>(n);
  std::vector<double> per_pair(n * width, 0.0);
  std::vector<double> losses(n, 0.0);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      losses[i] = pair_gradient(model, batch[i], inputs, weight,
                                std::span<double>(per_pair).subspan(i * width, width));
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
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
  std::fill(grads.begin(), grads.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* g = per_pair.data() + i * width;
    for (std::size_t k = 0; k < width; ++k) grads[k] += g[k];
    loss += losses[i];
  }
  return loss * weight;
}

std::unordered_map<std::string, double> score_scenes(const ScorerModel& model,
                                                     std::span<const PreferencePair> pairs,
                                                     const SceneInputs& inputs) {
  std::unordered_map<std::string, double> scores;
  for (const PreferencePair& p : pairs) {
    for (const std::string* id : {&p.tidier, &p.messier}) {
      if (!scores.contains(*id)) scores.emplace(*id, score_input(model, inputs.input(*id)));
    }
  }
  return scores;
}

double pairwise_accuracy(const ScorerModel& model, std::span<const PreferencePair> pairs,
                         const SceneInputs& inputs) {
  if (pairs.empty()) throw Error(ErrorKind::kInvalidArgument, "no pairs to evaluate");
  const auto scores = score_scenes(model, pairs, inputs);
  double correct = 0.0;
  for (const PreferencePair& p : pairs) {
    const double prob = pair_prob_from_scores(scores.at(p.tidier), scores.at(p.messier));
    if (prob > 0.5) {
      correct += 1.0;
    } else if (prob == 0.5) {
      correct += 0.5;
    }
  }
  return correct / static_cast<double>(pairs.size());
}

bool DatasetSplit::is_validation(int trajectory) const {
  return std::binary_search(val_trajectories.begin(), val_trajectories.end(), trajectory);
}

DatasetSplit split_by_trajectory(const Dataset& dataset, double val_fraction,
                                 std::uint64_t seed) {
  std::vector<int> ids;
  for (const PreferencePair& p : dataset.pairs) ids.push_back(p.trajectory);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  Rng rng(split_seed(seed, kSplitStream));
  shuffle(ids, rng);
  std::size_t n_val = static_cast<std::size_t>(std::llround(val_fraction * ids.size()));
  if (ids.size() >= 2) n_val = std::clamp<std::size_t>(n_val, 1, ids.size() - 1);

  DatasetSplit split;
  split.val_trajectories.assign(ids.begin(), ids.begin() + std::min(n_val, ids.size()));
  split.train_trajectories.assign(ids.begin() + std::min(n_val, ids.size()), ids.end());
  std::sort(split.val_trajectories.begin(), split.val_trajectories.end());
  std::sort(split.train_trajectories.begin(), split.train_trajectories.end());
  return split;
}

std::vector<PreferencePair> pairs_in(const Dataset& dataset, const DatasetSplit& split,
                                     bool validation) {
  std::vector<PreferencePair> out;
  for (const PreferencePair& p : dataset.pairs) {
    if (split.is_validation(p.trajectory) == validation) out.push_back(p);
  }
  return out;
}

TrainResult train(const TrainConfig& config, const Dataset& dataset) {
  validate(config);
  if (dataset.pairs.empty()) throw Error(ErrorKind::kInvalidArgument, "dataset has no pairs");
  TrainResult result;
  result.split = split_by_trajectory(dataset, config.val_fraction, config.seed);
  if (result.split.train_trajectories.empty() || result.split.val_trajectories.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "validation split needs at least one trajectory on each side");
  }
  const std::vector<PreferencePair> train_pairs = pairs_in(dataset, result.split, false);
  const std::vector<PreferencePair> val_pairs = pairs_in(dataset, result.split, true);
  const SceneInputs inputs(dataset, config.encoder);

  ScorerModel model =
      ScorerModel::random(config.encoder, split_seed(config.seed, kInitStream), 0.08);
  nn::AdamState adam(model.params.size());
  const nn::AdamConfig adam_config{config.learning_rate};
  std::vector<double> grads(model.params.size(), 0.0);

  std::vector<double> best = model.params;
  double best_accuracy = -1.0;
  int stale = 0;
  std::vector<std::size_t> order(train_pairs.size());
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(split_seed(config.seed, kEpochStreamBase + static_cast<std::uint64_t>(epoch)));
    shuffle(order, rng);

    double loss_sum = 0.0;
    std::vector<PreferencePair> batch;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_pairs[order[i]]);
      const double loss = bt_loss_gradient(model, batch, inputs, grads, config.threads);
      loss_sum += loss * static_cast<double>(batch.size());
      nn::adam_step(model.params, grads, adam, adam_config);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = loss_sum / static_cast<double>(train_pairs.size());
    metrics.val_accuracy = pairwise_accuracy(model, val_pairs, inputs);
    result.history.push_back(metrics);

    if (metrics.val_accuracy > best_accuracy) {
      best_accuracy = metrics.val_accuracy;
      best = model.params;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.early_stop_patience) {
      break;
    }
  }

  result.model.encoder = config.encoder;
  result.model.params.reserve(best.size());
  for (double v : best) result.model.params.push_back(static_cast<double>(static_cast<float>(v)));
  return result;
}

EvalReport evaluate(const ScorerModel& model, const Dataset& dataset,
                    std::span<const PreferencePair> pairs, const SceneInputs& inputs) {
  const auto scores = score_scenes(model, pairs, inputs);
  std::unordered_map<std::string, double> disorders;
  auto disorder_of = [&](const std::string& id) {
    auto it = disorders.find(id);
    if (it == disorders.end()) it = disorders.emplace(id, disorder(dataset.scene(id)).total).first;
    return it->second;
  };

  struct Tally {
    std::size_t count = 0;
    double hits = 0.0;
    void add(double hit) {
      ++count;
      hits += hit;
    }
    PairMetric metric() const {
      PairMetric m;
      m.count = count;
      if (count > 0) m.value = hits / static_cast<double>(count);
      return m;
    }
  };
  Tally overall, global, local, gap1, gap2, gap3, agree3, agree_all;
  for (const PreferencePair& p : pairs) {
    const double diff = scores.at(p.tidier) - scores.at(p.messier);
    const double hit = diff > 0.0 ? 1.0 : (diff == 0.0 ? 0.5 : 0.0);
    overall.add(hit);
    const int gap = p.t_messier - p.t_tidier;
    if (p.provenance == Provenance::kLocal) {
      local.add(hit);
    } else {
      global.add(hit);
      (gap <= 1 ? gap1 : gap == 2 ? gap2 : gap3).add(hit);
    }
    const double oracle_diff = disorder_of(p.messier) - disorder_of(p.tidier);
    if (oracle_diff == 0.0) continue;
    const double agree = diff == 0.0 ? 0.5 : ((diff > 0.0) == (oracle_diff > 0.0) ? 1.0 : 0.0);
    agree_all.add(agree);
    if (p.provenance == Provenance::kGlobal && gap >= 3) agree3.add(agree);
  }
  return {overall.metric(), global.metric(), local.metric(), gap1.metric(),
          gap2.metric(),   gap3.metric(),   agree3.metric(), agree_all.metric()};
}

}  // namespace tidy
