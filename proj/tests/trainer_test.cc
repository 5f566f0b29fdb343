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
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"
#include "tidy/checkpoint.h"
#include "tidy/datagen.h"
#include "tidy/nn.h"

namespace tidy {
namespace {

using testing::object;

// Two-scene dataset: "a" covers more of the table than "b".
Dataset tiny_dataset() {
  Dataset d;
  d.meta.trajectory_count = 1;
  d.scenes.emplace("a", place(new_scene(1.2, 0.8), object(0, "mat", 0.6, 0.4), 0.6, 0.4));
  d.scenes.emplace("b", place(new_scene(1.2, 0.8), object(0, "mat", 0.3, 0.2), 0.6, 0.4));
  d.scene_ids = {"a", "b"};
  d.pairs = {{"a", "b", Provenance::kGlobal, 0, 0, 1}};
  return d;
}

// Features model whose score is w * occupancy mean, via one path of unit
// weights through the network.
ScorerModel occupancy_model(double w) {
  ScorerModel m = ScorerModel::zeros(EncoderKind::kFeatures);
  const ParamLayout& l = param_layout(EncoderKind::kFeatures);
  m.params[l.enc_w1 + 32] = w;  // hidden 0 <- feature 32
  m.params[l.enc_w2 + 0] = 1.0;
  m.params[l.head_w1 + 0] = 1.0;
  m.params[l.head_w2 + 0] = 1.0;
  return m;
}

Dataset small_dataset(std::uint64_t seed, int trajectories) {
  DatasetMeta meta;
  meta.master_seed = seed;
  meta.trajectory_count = trajectories;
  return generate_dataset(meta);
}

TEST(BtLossTest, ZeroModelGivesLnTwo) {
  const Dataset d = tiny_dataset();
  const SceneInputs in(d, EncoderKind::kFeatures);
  EXPECT_NEAR(bt_loss(ScorerModel::zeros(EncoderKind::kFeatures), d.pairs, in), std::log(2.0),
              1e-15);
}

TEST(BtLossTest, ScoreGapOfTenGivesTinyLoss) {
  const Dataset d = tiny_dataset();
  const SceneInputs in(d, EncoderKind::kFeatures);
  // Occupancy means are 0.25 and 0.0625.
  const ScorerModel m = occupancy_model(10.0 / (0.25 - 0.0625));
  EXPECT_NEAR(score_input(m, in.input("a")) - score_input(m, in.input("b")), 10.0, 1e-9);
  EXPECT_NEAR(bt_loss(m, d.pairs, in), 4.54e-5, 1e-7);
  EXPECT_NEAR(bt_loss(m, d.pairs, in), std::log1p(std::exp(-10.0)), 1e-12);
}

TEST(BtLossTest, EmptyBatchThrows) {
  const Dataset d = tiny_dataset();
  const SceneInputs in(d, EncoderKind::kFeatures);
  EXPECT_TIDY_ERROR(bt_loss(ScorerModel::zeros(EncoderKind::kFeatures), {}, in),
                    ErrorKind::kInvalidArgument);
}

TEST(BtLossTest, SmallGradientStepDescends) {
  const Dataset d = small_dataset(1, 3);
  for (EncoderKind k : {EncoderKind::kFeatures, EncoderKind::kCnn}) {
    const SceneInputs in(d, k);
    const std::vector<PreferencePair> batch(d.pairs.begin(), d.pairs.begin() + 16);
    ScorerModel m = ScorerModel::random(k, 3, 0.2);
    std::vector<double> g(m.params.size());
    const double before = bt_loss_gradient(m, batch, in, g);
    EXPECT_DOUBLE_EQ(before, bt_loss(m, batch, in));
    for (std::size_t i = 0; i < g.size(); ++i) m.params[i] -= 1e-4 * g[i];
    EXPECT_LT(bt_loss(m, batch, in), before) << to_string(k);
  }
}

TEST(BtLossTest, GradientIndependentOfThreadCount) {
  const Dataset d = small_dataset(2, 3);
  const SceneInputs in(d, EncoderKind::kFeatures);
  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 4, 0.3);
  std::vector<double> g1(m.params.size()), g4(m.params.size());
  const double l1 = bt_loss_gradient(m, d.pairs, in, g1, 1);
  const double l4 = bt_loss_gradient(m, d.pairs, in, g4, 4);
  EXPECT_EQ(l1, l4);
  EXPECT_EQ(g1, g4);
}

TEST(AccuracyTest, ZeroModelIsChanceAndReversalComplements) {
  const Dataset d = small_dataset(3, 4);
  const SceneInputs in(d, EncoderKind::kFeatures);
  EXPECT_EQ(pairwise_accuracy(ScorerModel::zeros(EncoderKind::kFeatures), d.pairs, in), 0.5);

  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 5, 0.5);
  std::vector<PreferencePair> reversed = d.pairs;
  for (PreferencePair& p : reversed) std::swap(p.tidier, p.messier);
  EXPECT_NEAR(pairwise_accuracy(m, reversed, in), 1.0 - pairwise_accuracy(m, d.pairs, in), 1e-12);
}

TEST(SplitTest, TrajectoriesNeverLeakAcrossSides) {
  const Dataset d = small_dataset(4, 20);
  const DatasetSplit s = split_by_trajectory(d, 0.15, 9);
  EXPECT_EQ(s.val_trajectories.size(), 3u);
  EXPECT_EQ(s.train_trajectories.size() + s.val_trajectories.size(), 20u);
  const std::set<int> val(s.val_trajectories.begin(), s.val_trajectories.end());
  for (int t : s.train_trajectories) EXPECT_FALSE(val.count(t));
  for (const PreferencePair& p : pairs_in(d, s, true)) EXPECT_TRUE(val.count(p.trajectory));
  for (const PreferencePair& p : pairs_in(d, s, false)) EXPECT_FALSE(val.count(p.trajectory));
  EXPECT_EQ(pairs_in(d, s, true).size() + pairs_in(d, s, false).size(), d.pairs.size());

  const DatasetSplit again = split_by_trajectory(d, 0.15, 9);
  EXPECT_EQ(again.val_trajectories, s.val_trajectories);
}

TEST(TrainTest, DeterministicAndImproves) {
  const Dataset d = small_dataset(5, 20);
  TrainConfig c;
  c.seed = 3;
  c.max_epochs = 6;
  const TrainResult a = train(c, d);
  c.threads = 3;
  const TrainResult b = train(c, d);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.history, b.history);
  ASSERT_FALSE(a.history.empty());
  EXPECT_LT(a.history.back().train_loss, std::log(2.0));
  EXPECT_GE(a.best_epoch, 1);
}

TEST(TrainTest, RejectsDegenerateInputs) {
  TrainConfig c;
  EXPECT_TIDY_ERROR(train(c, Dataset{}), ErrorKind::kInvalidArgument);
  EXPECT_TIDY_ERROR(train(c, small_dataset(6, 1)), ErrorKind::kInvalidArgument);
  c.batch_size = 0;
  EXPECT_TIDY_ERROR(validate(c), ErrorKind::kInvalidArgument);
}

TEST(TrainTest, CanMemorizeASmallSet) {
  const Dataset d = small_dataset(7, 2);
  const SceneInputs in(d, EncoderKind::kFeatures);
  ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 1, 0.08);
  nn::AdamState adam(m.params.size());
  std::vector<double> g(m.params.size());
  for (int step = 0; step < 1500; ++step) {
    bt_loss_gradient(m, d.pairs, in, g);
    nn::adam_step(m.params, g, adam, {3e-3});
  }
  EXPECT_GT(pairwise_accuracy(m, d.pairs, in), 0.95);
}

TEST(EvaluateTest, BucketsPartitionPairs) {
  const Dataset d = small_dataset(8, 6);
  const SceneInputs in(d, EncoderKind::kFeatures);
  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 2, 0.5);
  const EvalReport r = evaluate(m, d, d.pairs, in);
  EXPECT_EQ(r.overall.count, d.pairs.size());
  EXPECT_EQ(r.global.count + r.local.count, r.overall.count);
  EXPECT_EQ(r.gap_1.count + r.gap_2.count + r.gap_3plus.count, r.global.count);
  EXPECT_NEAR(*r.overall.value, pairwise_accuracy(m, d.pairs, in), 1e-12);
  EXPECT_LE(r.oracle_agreement_gap_3plus.count, r.gap_3plus.count);

  const EvalReport zero = evaluate(ScorerModel::zeros(EncoderKind::kFeatures), d, d.pairs, in);
  EXPECT_EQ(*zero.global.value, 0.5);
  EXPECT_EQ(*zero.oracle_agreement_all.value, 0.5);
  const EvalReport none = evaluate(m, d, {}, in);
  EXPECT_FALSE(none.overall.value.has_value());
}

TEST(CheckpointTest, RoundTripIsExact) {
  for (EncoderKind k : {EncoderKind::kFeatures, EncoderKind::kCnn}) {
    const ScorerModel m = ScorerModel::random(k, 11, 0.5);
    const std::string bytes = checkpoint_bytes(m);
    EXPECT_EQ(bytes.size(), 4 + 4 + 1 + 1 + 2 + 8 + 4 * m.params.size() + 4);
    EXPECT_EQ(bytes.substr(0, 4), "TDYC");
    EXPECT_EQ(parse_checkpoint(bytes), m);
  }
  testing::TempDir dir("ckpt");
  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 12);
  save_checkpoint(m, dir / "m.ckpt");
  EXPECT_EQ(load_checkpoint(dir / "m.ckpt"), m);
  EXPECT_TIDY_ERROR(load_checkpoint(dir / "missing.ckpt"), ErrorKind::kIoError);
}

TEST(CheckpointTest, TruncationAndBitFlipsAreDetected) {
  const std::string bytes = checkpoint_bytes(ScorerModel::random(EncoderKind::kFeatures, 13));
  for (std::size_t n = 0; n < bytes.size(); n += 97) {
    EXPECT_TIDY_ERROR(parse_checkpoint(std::string_view(bytes).substr(0, n)),
                      ErrorKind::kCorruptCheckpoint);
  }
  EXPECT_TIDY_ERROR(parse_checkpoint(bytes + "x"), ErrorKind::kCorruptCheckpoint);
  for (std::size_t i = 0; i < bytes.size(); i += 13) {
    for (int bit : {0, 5}) {
      std::string flipped = bytes;
      flipped[i] = static_cast<char>(flipped[i] ^ (1 << bit));
      EXPECT_TIDY_ERROR(parse_checkpoint(flipped), ErrorKind::kCorruptCheckpoint);
    }
  }
}

}  // namespace
}  // namespace tidy
