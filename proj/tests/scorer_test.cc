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

#include "tidy/scorer.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "test_util.h"
#include "tidy/nn.h"
#include "tidy/rng.h"

namespace tidy {
namespace {

using testing::object;

ScorerInput random_features(Rng& rng) {
  ScorerInput in{EncoderKind::kFeatures, 0, 0, std::vector<double>(kFeatureCount)};
  for (double& v : in.values) v = rng.uniform();
  return in;
}

ScorerInput random_image(Rng& rng, int h, int w) {
  std::vector<double> v(static_cast<std::size_t>(3) * h * w);
  // Sparse, mostly-zero planes resemble real rasters.
  for (double& x : v) x = rng.uniform() < 0.4 ? rng.uniform() : 0.0;
  return make_image_input(h, w, std::move(v));
}

// Forward pass written out loop by loop from the parameter layout.
double reference_score(const ScorerModel& m, const ScorerInput& in) {
  const std::vector<double>& p = m.params;
  const ParamLayout& l = param_layout(m.encoder);
  std::vector<double> emb(kEmbeddingSize, 0.0);
  if (m.encoder == EncoderKind::kFeatures) {
    std::vector<double> h(kFeatureHidden);
    for (std::size_t i = 0; i < kFeatureHidden; ++i) {
      double a = p[l.enc_b1 + i];
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        a += p[l.enc_w1 + i * kFeatureCount + j] * in.values[j];
      }
      h[i] = std::max(0.0, a);
    }
    for (std::size_t i = 0; i < kEmbeddingSize; ++i) {
      double a = p[l.enc_b2 + i];
      for (std::size_t j = 0; j < kFeatureHidden; ++j) {
        a += p[l.enc_w2 + i * kFeatureHidden + j] * h[j];
      }
      emb[i] = a;
    }
  } else {
    auto conv = [&](const std::vector<double>& x, int ic, int oc, int hh, int ww, std::size_t kw,
                    std::size_t kb, int& oh, int& ow) {
      oh = (hh + 1) / 2;
      ow = (ww + 1) / 2;
      std::vector<double> y(static_cast<std::size_t>(oc) * oh * ow);
      for (int o = 0; o < oc; ++o) {
        for (int r = 0; r < oh; ++r) {
          for (int c = 0; c < ow; ++c) {
            double a = p[kb + o];
            for (int ch = 0; ch < ic; ++ch) {
              for (int ky = 0; ky < 5; ++ky) {
                for (int kx = 0; kx < 5; ++kx) {
                  const int iy = 2 * r + ky - 2;
                  const int ix = 2 * c + kx - 2;
                  if (iy < 0 || ix < 0 || iy >= hh || ix >= ww) continue;
                  a += p[kw + ((o * ic + ch) * 5 + ky) * 5 + kx] * x[(ch * hh + iy) * ww + ix];
                }
              }
            }
            y[(o * oh + r) * ow + c] = std::max(0.0, a);
          }
        }
      }
      return y;
    };
    int h1 = 0, w1 = 0, h2 = 0, w2 = 0;
    const auto a1 = conv(in.values, 3, 8, in.height, in.width, l.enc_w1, l.enc_b1, h1, w1);
    const auto a2 = conv(a1, 8, 16, h1, w1, l.enc_w2, l.enc_b2, h2, w2);
    for (int c = 0; c < 16; ++c) {
      double s = 0.0;
      for (int i = 0; i < h2 * w2; ++i) s += a2[c * h2 * w2 + i];
      emb[c] = s / (h2 * w2);
    }
  }
  double out = p[l.head_b2];
  for (std::size_t i = 0; i < kHeadHidden; ++i) {
    double a = p[l.head_b1 + i];
    for (std::size_t j = 0; j < kEmbeddingSize; ++j) a += p[l.head_w1 + i * kEmbeddingSize + j] * emb[j];
    out += p[l.head_w2 + i] * std::max(0.0, a);
  }
  return out;
}

TEST(ParamLayoutTest, Counts) {
  // 34*32+32 + 32*16+16 + 16*8+8 + 8+1
  EXPECT_EQ(param_count(EncoderKind::kFeatures), 1793u);
  // 8*3*25+8 + 16*8*25+16 + 16*8+8 + 8+1
  EXPECT_EQ(param_count(EncoderKind::kCnn), 3969u);
  EXPECT_EQ(parse_encoder_kind("cnn"), EncoderKind::kCnn);
  EXPECT_EQ(to_string(EncoderKind::kFeatures), "features");
  EXPECT_TIDY_ERROR(parse_encoder_kind("mlp"), ErrorKind::kInvalidArgument);
}

TEST(FeaturesTest, EmptySceneIsAllZeros) {
  const FeatureVector f = geometric_features(rasterize(new_scene(1.2, 0.8)));
  for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(FeaturesTest, FullTableObject) {
  const FeatureVector f =
      geometric_features(rasterize(place(new_scene(1.2, 0.8), object(0, "mat", 1.2, 0.8), 0.6, 0.4)));
  for (std::size_t i = 0; i < 33; ++i) EXPECT_DOUBLE_EQ(f[i], 1.0) << i;
  EXPECT_EQ(f[33], 0.0);
}

TEST(FeaturesTest, TwoEqualAreasGiveOneBitOfEntropy) {
  SceneState s = new_scene(1.2, 0.8);
  s = place(s, object(0, "a", 0.1, 0.1), 0.3, 0.4);
  s = place(s, object(1, "a", 0.1, 0.1), 0.8, 0.4);
  const FeatureVector f = geometric_features(rasterize(s));
  EXPECT_NEAR(f[33], std::log(2.0) / std::log(64.0), 1e-12);
  EXPECT_NEAR(f[33], 0.1667, 1e-4);
}

TEST(ForwardTest, ZeroModelScoresZero) {
  Rng rng(1);
  for (EncoderKind k : {EncoderKind::kFeatures, EncoderKind::kCnn}) {
    const ScorerModel m = ScorerModel::zeros(k);
    const ScorerInput in = k == EncoderKind::kFeatures ? random_features(rng) : random_image(rng, 8, 12);
    EXPECT_EQ(score_input(m, in), 0.0);
  }
}

TEST(ForwardTest, MatchesReference) {
  Rng rng(2);
  for (int seed = 0; seed < 5; ++seed) {
    const ScorerModel f = ScorerModel::random(EncoderKind::kFeatures, seed, 0.5);
    const ScorerInput fi = random_features(rng);
    EXPECT_NEAR(score_input(f, fi), reference_score(f, fi), 1e-12);

    const ScorerModel c = ScorerModel::random(EncoderKind::kCnn, seed, 0.5);
    const ScorerInput ci = random_image(rng, 10, 14);
    EXPECT_NEAR(score_input(c, ci), reference_score(c, ci), 1e-12);
  }
}

TEST(ForwardTest, FullRasterCnnMatchesReference) {
  SceneState s = new_scene(1.2, 0.8);
  s = place(s, object(0, "cup", 0.08, 0.08), 0.2, 0.3);
  s = place(s, object(3, "fork", 0.02, 0.18), 0.7, 0.5);
  const RasterImage img = rasterize(s);
  const ScorerModel m = ScorerModel::random(EncoderKind::kCnn, 9, 0.3);
  EXPECT_NEAR(score(m, img), reference_score(m, make_input(EncoderKind::kCnn, img)), 1e-12);
}

TEST(ForwardTest, InputKindMismatchThrows) {
  Rng rng(3);
  EXPECT_TIDY_ERROR(score_input(ScorerModel::zeros(EncoderKind::kCnn), random_features(rng)),
                    ErrorKind::kInvalidArgument);
  ScorerModel bad = ScorerModel::zeros(EncoderKind::kFeatures);
  bad.params.pop_back();
  EXPECT_TIDY_ERROR(validate(bad), ErrorKind::kInvalidArgument);
}

TEST(PairProbTest, Examples) {
  EXPECT_NEAR(pair_prob_from_scores(1.0, 0.0), 0.731058, 1e-6);
  EXPECT_EQ(pair_prob_from_scores(2.0, 2.0), 0.5);
  const RasterImage a = rasterize(new_scene(1.2, 0.8));
  EXPECT_EQ(pair_prob(ScorerModel::zeros(EncoderKind::kFeatures), a, a), 0.5);
}

TEST(PairProbTest, AntisymmetricAndShiftInvariant) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-30, 30);
    const double b = rng.uniform(-30, 30);
    const double c = rng.uniform(-100, 100);
    EXPECT_LE(std::fabs(pair_prob_from_scores(a, b) + pair_prob_from_scores(b, a) - 1.0), 1e-12);
    EXPECT_NEAR(pair_prob_from_scores(a + c, b + c), pair_prob_from_scores(a, b), 1e-9);
  }
}

TEST(PairProbTest, ArgmaxScoreWinsEveryComparison) {
  Rng rng(5);
  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    for (int i = 0; i < 16; ++i) s.push_back(score_input(m, random_features(rng)));
    const std::size_t best = std::max_element(s.begin(), s.end()) - s.begin();
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j != best) EXPECT_GE(pair_prob_from_scores(s[best], s[j]), 0.5);
    }
  }
}

TEST(GradientTest, FeaturesEncoderMatchesFiniteDifferences) {
  Rng rng(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, seed, 0.5);
    std::vector<testing::InputPair> pairs;
    for (int i = 0; i < 3; ++i) pairs.emplace_back(random_features(rng), random_features(rng));
    const auto analytic = testing::pair_loss_gradient(m, pairs);
    const auto r = testing::check_gradient(m, analytic, pairs);
    EXPECT_LE(r.max_relative_error, 1e-4) << "seed " << seed;
    EXPECT_GT(r.checked, m.params.size() * 9 / 10);
  }
}

TEST(GradientTest, CnnEncoderMatchesFiniteDifferences) {
  Rng rng(7);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ScorerModel m = ScorerModel::random(EncoderKind::kCnn, seed, 0.5);
    const std::vector<testing::InputPair> pairs = {{random_image(rng, 8, 8), random_image(rng, 8, 8)}};
    const auto analytic = testing::pair_loss_gradient(m, pairs);
    const auto r = testing::check_gradient(m, analytic, pairs);
    EXPECT_LE(r.max_relative_error, 1e-4) << "seed " << seed;
    EXPECT_GT(r.checked, m.params.size() / 2);
  }
}

TEST(GradientTest, CheckerLossMatchesForwardScore) {
  Rng rng(12);
  for (EncoderKind kind : {EncoderKind::kFeatures, EncoderKind::kCnn}) {
    const ScorerModel m = ScorerModel::random(kind, 5, 0.5);
    std::vector<testing::InputPair> pairs;
    for (int i = 0; i < 3; ++i) {
      if (kind == EncoderKind::kFeatures) {
        pairs.emplace_back(random_features(rng), random_features(rng));
      } else {
        pairs.emplace_back(random_image(rng, 8, 8), random_image(rng, 8, 8));
      }
    }
    const std::vector<long double> p(m.params.begin(), m.params.end());
    long double direct = 0.0L;
    for (const auto& [a, b] : pairs) {
      const long double d = forward_score<long double>(kind, p, a) - forward_score<long double>(kind, p, b);
      direct += std::log1p(std::exp(-d));
    }
    EXPECT_NEAR(static_cast<double>(testing::pair_loss_ld(kind, p, pairs)),
                static_cast<double>(direct / 3.0L), 1e-15);
  }
}

TEST(GradientTest, BackpropIsSumOfAccumulatedBranches) {
  Rng rng(8);
  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 8, 0.5);
  const std::vector<ScorerInput> inputs = {random_features(rng), random_features(rng)};
  const std::vector<double> upstream = {0.7, -1.3};
  const auto combined = backprop(m, inputs, upstream);
  std::vector<double> manual(m.params.size(), 0.0);
  accumulate_gradient(m, inputs[0], upstream[0], manual);
  accumulate_gradient(m, inputs[1], upstream[1], manual);
  ASSERT_EQ(combined.size(), manual.size());
  for (std::size_t i = 0; i < manual.size(); ++i) EXPECT_NEAR(combined[i], manual[i], 1e-15);
}

TEST(GradientTest, AccumulateReturnsScore) {
  Rng rng(9);
  const ScorerModel m = ScorerModel::random(EncoderKind::kFeatures, 9, 0.5);
  const ScorerInput in = random_features(rng);
  std::vector<double> g(m.params.size(), 0.0);
  EXPECT_DOUBLE_EQ(accumulate_gradient(m, in, 1.0, g), score_input(m, in));
  // The output bias always has unit derivative.
  EXPECT_EQ(g[param_layout(m.encoder).head_b2], 1.0);
}

TEST(ScorerModelTest, RandomIsFloatRepresentableAndSeeded) {
  const ScorerModel a = ScorerModel::random(EncoderKind::kCnn, 3);
  EXPECT_EQ(a, ScorerModel::random(EncoderKind::kCnn, 3));
  EXPECT_NE(a, ScorerModel::random(EncoderKind::kCnn, 4));
  for (double v : a.params) {
    EXPECT_EQ(static_cast<double>(static_cast<float>(v)), v);
    EXPECT_LE(std::fabs(v), 0.08);
  }
}

}  // namespace
}  // namespace tidy
