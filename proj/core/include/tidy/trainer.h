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

#ifndef TIDY_TRAINER_H_
#define TIDY_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tidy/datagen.h"
#include "tidy/scorer.h"

namespace tidy {

struct TrainConfig {
  EncoderKind encoder = EncoderKind::kFeatures;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_epochs = 50;
  int early_stop_patience = 5;
  double val_fraction = 0.15;
  std::uint64_t seed = 0;
  int threads = 1;  // batch fan-out; results do not depend on it
};

void validate(const TrainConfig& config);

// Resolves scene ids to encoder inputs. Feature inputs are computed once up
// front; CNN inputs are rasterized on demand to bound memory.
class SceneInputs {
 public:
  SceneInputs(const Dataset& dataset, EncoderKind kind);

  EncoderKind kind() const { return kind_; }
  // Throws kDanglingReference for unknown ids.
  ScorerInput input(const std::string& scene_id) const;

 private:
  const Dataset* dataset_;
  EncoderKind kind_;
  std::unordered_map<std::string, ScorerInput> cache_;
};

// Mean of -log P(tidier > messier) over the batch, in log-sigmoid form.
// Throws kInvalidArgument for an empty batch.
double bt_loss(const ScorerModel& model, std::span<const PreferencePair> batch,
               const SceneInputs& inputs);

// Same loss; also writes its gradient into `grads` (overwritten). Each pair's
// two-branch gradient is formed separately and the pairs are summed in batch
// order, so any `threads` value gives bitwise-identical results.
double bt_loss_gradient(const ScorerModel& model, std::span<const PreferencePair> batch,
                        const SceneInputs& inputs, std::span<double> grads, int threads = 1);

// Fraction of pairs with P(tidier > messier) > 0.5; exact ties count 0.5.
double pairwise_accuracy(const ScorerModel& model, std::span<const PreferencePair> pairs,
                         const SceneInputs& inputs);

// Scores every scene referenced by `pairs` once.
std::unordered_map<std::string, double> score_scenes(const ScorerModel& model,
                                                     std::span<const PreferencePair> pairs,
                                                     const SceneInputs& inputs);

struct DatasetSplit {
  std::vector<int> train_trajectories;
  std::vector<int> val_trajectories;

  bool is_validation(int trajectory) const;
};

// Seeded split of trajectory ids; round(val_fraction * count) trajectories,
// clamped to leave at least one on each side when count >= 2.
DatasetSplit split_by_trajectory(const Dataset& dataset, double val_fraction, std::uint64_t seed);

std::vector<PreferencePair> pairs_in(const Dataset& dataset, const DatasetSplit& split,
                                     bool validation);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

struct TrainResult {
  ScorerModel model;  // best-validation parameters, rounded to float
  std::vector<EpochMetrics> history;
  int best_epoch = 0;
  DatasetSplit split;
};

// Throws kInvalidArgument for a dataset without pairs or a split that leaves
// either side without trajectories.
TrainResult train(const TrainConfig& config, const Dataset& dataset);

struct PairMetric {
  std::size_t count = 0;
  std::optional<double> value;  // empty when no pair qualified
};

// Held-out report. Gap buckets cover global pairs only. Oracle agreement is
// the fraction of pairs where the score difference has the same sign as the
// oracle disorder difference; pairs the oracle cannot order are left out and
// exact score ties count 0.5.
struct EvalReport {
  PairMetric overall;
  PairMetric global;
  PairMetric local;
  PairMetric gap_1;
  PairMetric gap_2;
  PairMetric gap_3plus;
  PairMetric oracle_agreement_gap_3plus;
  PairMetric oracle_agreement_all;
};

EvalReport evaluate(const ScorerModel& model, const Dataset& dataset,
                    std::span<const PreferencePair> pairs, const SceneInputs& inputs);

}  // namespace tidy

#endif  // TIDY_TRAINER_H_
