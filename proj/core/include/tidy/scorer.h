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

#ifndef TIDY_SCORER_H_
#define TIDY_SCORER_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tidy/raster.h"

namespace tidy {

enum class EncoderKind : std::uint8_t { kFeatures = 0, kCnn = 1 };

std::string_view to_string(EncoderKind kind);
// Accepts "features" or "cnn"; throws kInvalidArgument otherwise.
EncoderKind parse_encoder_kind(std::string_view name);

inline constexpr std::size_t kFeatureCount = 34;
inline constexpr std::size_t kProfileBins = 16;
inline constexpr std::size_t kFeatureHidden = 32;
inline constexpr std::size_t kEmbeddingSize = 16;
inline constexpr std::size_t kHeadHidden = 8;
inline constexpr int kConv1Channels = 8;
inline constexpr int kConv2Channels = 16;

using FeatureVector = std::array<double, kFeatureCount>;

// [0,16) row occupancy profile, [16,32) column profile, 32 occupancy mean,
// 33 area-weighted instance entropy / ln 64.
FeatureVector geometric_features(const RasterImage& image);

// Parameter offsets, layer-major, row-major within each weight matrix.
//   features: W1[32x34] b1[32] W2[16x32] b2[16]
//   cnn:      K1[8x3x5x5] c1[8] K2[16x8x5x5] c2[16]
//   head:     W3[8x16] b3[8] W4[1x8] b4[1]
struct ParamLayout {
  std::size_t enc_w1 = 0, enc_b1 = 0, enc_w2 = 0, enc_b2 = 0;
  std::size_t head_w1 = 0, head_b1 = 0, head_w2 = 0, head_b2 = 0;
  std::size_t total = 0;
};
const ParamLayout& param_layout(EncoderKind kind);
std::size_t param_count(EncoderKind kind);

struct ScorerModel {
  EncoderKind encoder = EncoderKind::kFeatures;
  std::vector<double> params;

  static ScorerModel zeros(EncoderKind kind);
  // Uniform(-scale, scale) draws rounded to float so the model survives a
  // checkpoint round trip unchanged.
  static ScorerModel random(EncoderKind kind, std::uint64_t seed, double scale = 0.08);

  bool operator==(const ScorerModel&) const = default;
};

// Throws kInvalidArgument on a parameter count mismatch or non-finite value.
void validate(const ScorerModel& model);

// What the encoder consumes for one image: the 34 features, or the raw
// 3-channel raster. Precomputing it lets training reuse work across epochs.
struct ScorerInput {
  EncoderKind kind = EncoderKind::kFeatures;
  int height = 0;  // cnn only
  int width = 0;   // cnn only
  std::vector<double> values;
};

ScorerInput make_input(EncoderKind kind, const RasterImage& image);
// CNN input of arbitrary spatial size (3 channels), used by small tests.
ScorerInput make_image_input(int height, int width, std::vector<double> values);

std::vector<double> encode(const ScorerModel& model, const RasterImage& image);
double score(const ScorerModel& model, const RasterImage& image);
double score_input(const ScorerModel& model, const ScorerInput& input);

// Bradley-Terry probability that `a` is tidier than `b`:
// exp(r(a)) / (exp(r(a)) + exp(r(b))) = sigmoid(r(a) - r(b)).
double pair_prob(const ScorerModel& model, const RasterImage& a, const RasterImage& b);
double pair_prob_from_scores(double score_a, double score_b);

// Adds upstream * d score(input) / d params to `grads` and returns the score.
// Calling it for both images of a pair sums the shared-weight contributions.
double accumulate_gradient(const ScorerModel& model, const ScorerInput& input, double upstream,
                           std::span<double> grads);

// Gradient of sum_i upstream[i] * score(inputs[i]).
std::vector<double> backprop(const ScorerModel& model, std::span<const ScorerInput> inputs,
                             std::span<const double> upstream);

// Scalar-generic forward pass; instantiated for double and long double.
template <class T>
T forward_score(EncoderKind kind, std::span<const T> params, const ScorerInput& input);

// Pre-activation values of every ReLU in the forward pass, in layer order.
// Gradient checks use it to detect kinks inside the finite-difference window.
template <class T>
std::vector<T> relu_preactivations(EncoderKind kind, std::span<const T> params,
                                   const ScorerInput& input);

}  // namespace tidy

#endif  // TIDY_SCORER_H_
