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
#include <map>

#include "tidy/error.h"
#include "tidy/nn.h"
#include "tidy/rng.h"

namespace tidy {
namespace {

ParamLayout make_layout(EncoderKind kind) {
  ParamLayout l;
  std::size_t at = 0;
  auto take = [&at](std::size_t n) {
    const std::size_t start = at;
    at += n;
    return start;
  };
  if (kind == EncoderKind::kFeatures) {
    l.enc_w1 = take(kFeatureHidden * kFeatureCount);
    l.enc_b1 = take(kFeatureHidden);
    l.enc_w2 = take(kEmbeddingSize * kFeatureHidden);
    l.enc_b2 = take(kEmbeddingSize);
  } else {
    constexpr std::size_t kk = nn::ConvGeometry::kKernel * nn::ConvGeometry::kKernel;
    l.enc_w1 = take(kConv1Channels * RasterImage::kChannels * kk);
    l.enc_b1 = take(kConv1Channels);
    l.enc_w2 = take(kConv2Channels * kConv1Channels * kk);
    l.enc_b2 = take(kConv2Channels);
  }
  l.head_w1 = take(kHeadHidden * kEmbeddingSize);
  l.head_b1 = take(kHeadHidden);
  l.head_w2 = take(kHeadHidden);
  l.head_b2 = take(1);
  l.total = at;
  return l;
}

const ParamLayout kFeaturesLayout = make_layout(EncoderKind::kFeatures);
const ParamLayout kCnnLayout = make_layout(EncoderKind::kCnn);

template <class T>
std::span<const T> slice(std::span<const T> all, std::size_t offset, std::size_t n) {
  return all.subspan(offset, n);
}

nn::ConvGeometry conv1_geometry(const ScorerInput& in) {
  return {RasterImage::kChannels, kConv1Channels, in.height, in.width};
}

nn::ConvGeometry conv2_geometry(const ScorerInput& in) {
  const nn::ConvGeometry g1 = conv1_geometry(in);
  return {kConv1Channels, kConv2Channels, g1.out_height(), g1.out_width()};
}

// All intermediate activations of one forward pass. Pre-activation buffers
// are kept so the backward pass can apply the ReLU masks.
template <class T>
struct Activations {
  std::vector<T> input;      // features or image, converted to T
  std::vector<T> enc_pre1;   // first encoder layer before ReLU
  std::vector<T> enc_act1;
  std::vector<T> enc_pre2;   // cnn: second conv before ReLU
  std::vector<T> enc_act2;   // cnn: after ReLU
  std::vector<T> embedding;
  std::vector<T> head_pre;
  std::vector<T> head_act;
  T score = T(0);
};

void check_input(EncoderKind kind, std::size_t n_params, const ScorerInput& input) {
  if (n_params != param_count(kind)) {
    throw Error(ErrorKind::kInvalidArgument, "parameter count " + std::to_string(n_params) +
                                                 " does not match the " +
                                                 std::string(to_string(kind)) + " architecture");
  }
  if (input.kind != kind) {
    throw Error(ErrorKind::kInvalidArgument, "scorer input prepared for a different encoder");
  }
  if (kind == EncoderKind::kFeatures && input.values.size() != kFeatureCount) {
    throw Error(ErrorKind::kInvalidArgument, "feature input must have 34 values");
  }
  if (kind == EncoderKind::kCnn &&
      (input.height <= 0 || input.width <= 0 ||
       input.values.size() !=
           static_cast<std::size_t>(RasterImage::kChannels) * input.height * input.width)) {
    throw Error(ErrorKind::kInvalidArgument, "image input shape mismatch");
  }
}

template <class T>
Activations<T> run_forward(EncoderKind kind, std::span<const T> p, const ScorerInput& in) {
  check_input(kind, p.size(), in);
  const ParamLayout& l = param_layout(kind);
  Activations<T> a;
  a.input.assign(in.values.begin(), in.values.end());
  a.embedding.assign(kEmbeddingSize, T(0));

  if (kind == EncoderKind::kFeatures) {
    a.enc_pre1.assign(kFeatureHidden, T(0));
    nn::dense_forward<T>(slice(p, l.enc_w1, kFeatureHidden * kFeatureCount),
                         slice(p, l.enc_b1, kFeatureHidden), a.input, a.enc_pre1);
    a.enc_act1.resize(kFeatureHidden);
    for (std::size_t i = 0; i < kFeatureHidden; ++i) a.enc_act1[i] = nn::relu(a.enc_pre1[i]);
    nn::dense_forward<T>(slice(p, l.enc_w2, kEmbeddingSize * kFeatureHidden),
                         slice(p, l.enc_b2, kEmbeddingSize), a.enc_act1, a.embedding);
  } else {
    const nn::ConvGeometry g1 = conv1_geometry(in);
    const nn::ConvGeometry g2 = conv2_geometry(in);
    a.enc_pre1.assign(g1.output_size(), T(0));
    nn::conv2d_forward<T>(slice(p, l.enc_w1, g1.kernel_count()),
                          slice(p, l.enc_b1, kConv1Channels), g1, a.input, a.enc_pre1);
    a.enc_act1.resize(a.enc_pre1.size());
    for (std::size_t i = 0; i < a.enc_pre1.size(); ++i) a.enc_act1[i] = nn::relu(a.enc_pre1[i]);
    a.enc_pre2.assign(g2.output_size(), T(0));
    nn::conv2d_forward<T>(slice(p, l.enc_w2, g2.kernel_count()),
                          slice(p, l.enc_b2, kConv2Channels), g2, a.enc_act1, a.enc_pre2);
    a.enc_act2.resize(a.enc_pre2.size());
    for (std::size_t i = 0; i < a.enc_pre2.size(); ++i) a.enc_act2[i] = nn::relu(a.enc_pre2[i]);
    const std::size_t plane = static_cast<std::size_t>(g2.out_height()) * g2.out_width();
    for (std::size_t c = 0; c < kEmbeddingSize; ++c) {
      T acc = T(0);
      for (std::size_t i = 0; i < plane; ++i) acc += a.enc_act2[c * plane + i];
      a.embedding[c] = acc / static_cast<T>(plane);
    }
  }

  a.head_pre.assign(kHeadHidden, T(0));
  nn::dense_forward<T>(slice(p, l.head_w1, kHeadHidden * kEmbeddingSize),
                       slice(p, l.head_b1, kHeadHidden), a.embedding, a.head_pre);
  a.head_act.resize(kHeadHidden);
  for (std::size_t i = 0; i < kHeadHidden; ++i) a.head_act[i] = nn::relu(a.head_pre[i]);
  T out[1] = {T(0)};
  nn::dense_forward<T>(slice(p, l.head_w2, kHeadHidden), slice(p, l.head_b2, 1), a.head_act,
                       std::span<T>(out, 1));
  a.score = out[0];
  return a;
}

}  // namespace

std::string_view to_string(EncoderKind kind) {
  return kind == EncoderKind::kFeatures ? "features" : "cnn";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "features") return EncoderKind::kFeatures;
  if (name == "cnn") return EncoderKind::kCnn;
  throw Error(ErrorKind::kInvalidArgument, "unknown encoder '" + std::string(name) + "'");
}

const ParamLayout& param_layout(EncoderKind kind) {
  return kind == EncoderKind::kFeatures ? kFeaturesLayout : kCnnLayout;
}

std::size_t param_count(EncoderKind kind) { return param_layout(kind).total; }

FeatureVector geometric_features(const RasterImage& image) {
  constexpr int H = RasterImage::kHeight;
  constexpr int W = RasterImage::kWidth;
  constexpr int kRowsPerBin = H / static_cast<int>(kProfileBins);
  constexpr int kColsPerBin = W / static_cast<int>(kProfileBins);
  FeatureVector f{};
  double total = 0.0;
  std::array<double, H> row_mean{};
  std::array<double, W> col_mean{};
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const double v = image.at(0, r, c);
      row_mean[r] += v;
      col_mean[c] += v;
      total += v;
    }
  }
  for (int r = 0; r < H; ++r) row_mean[r] /= W;
  for (int c = 0; c < W; ++c) col_mean[c] /= H;
  for (std::size_t b = 0; b < kProfileBins; ++b) {
    double acc = 0.0;
    for (int i = 0; i < kRowsPerBin; ++i) acc += row_mean[b * kRowsPerBin + i];
    f[b] = acc / kRowsPerBin;
    acc = 0.0;
    for (int i = 0; i < kColsPerBin; ++i) acc += col_mean[b * kColsPerBin + i];
    f[kProfileBins + b] = acc / kColsPerBin;
  }
  f[2 * kProfileBins] = total / static_cast<double>(RasterImage::kPlane);

  // Area histogram of instance values; std::map keeps summation order fixed.
  std::map<double, std::size_t> areas;
  std::size_t labelled = 0;
  for (std::size_t i = 0; i < RasterImage::kPlane; ++i) {
    const double v = image.data[RasterImage::kPlane + i];
    if (v != 0.0) {
      ++areas[v];
      ++labelled;
    }
  }
  double entropy = 0.0;
  for (const auto& [value, count] : areas) {
    const double q = static_cast<double>(count) / static_cast<double>(labelled);
    entropy -= q * std::log(q);
  }
  f[2 * kProfileBins + 1] = areas.size() > 1 ? entropy / std::log(64.0) : 0.0;
  return f;
}

ScorerModel ScorerModel::zeros(EncoderKind kind) {
  return ScorerModel{kind, std::vector<double>(param_count(kind), 0.0)};
}

ScorerModel ScorerModel::random(EncoderKind kind, std::uint64_t seed, double scale) {
  Rng rng(seed);
  ScorerModel model = zeros(kind);
  for (double& v : model.params) {
    v = static_cast<double>(static_cast<float>(rng.uniform(-scale, scale)));
  }
  return model;
}

void validate(const ScorerModel& model) {
  if (model.params.size() != param_count(model.encoder)) {
    throw Error(ErrorKind::kInvalidArgument, "model has " + std::to_string(model.params.size()) +
                                                 " parameters, " +
                                                 std::string(to_string(model.encoder)) +
                                                 " architecture needs " +
                                                 std::to_string(param_count(model.encoder)));
  }
  for (double v : model.params) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "non-finite model parameter");
  }
}

ScorerInput make_input(EncoderKind kind, const RasterImage& image) {
  ScorerInput in;
  in.kind = kind;
  if (kind == EncoderKind::kFeatures) {
    const FeatureVector f = geometric_features(image);
    in.values.assign(f.begin(), f.end());
  } else {
    in.height = RasterImage::kHeight;
    in.width = RasterImage::kWidth;
    in.values = image.data;
  }
  return in;
}

ScorerInput make_image_input(int height, int width, std::vector<double> values) {
  ScorerInput in{EncoderKind::kCnn, height, width, std::move(values)};
  check_input(EncoderKind::kCnn, param_count(EncoderKind::kCnn), in);
  return in;
}

template <class T>
T forward_score(EncoderKind kind, std::span<const T> params, const ScorerInput& input) {
  return run_forward<T>(kind, params, input).score;
}

template <class T>
std::vector<T> relu_preactivations(EncoderKind kind, std::span<const T> params,
                                   const ScorerInput& input) {
  Activations<T> a = run_forward<T>(kind, params, input);
  std::vector<T> all = std::move(a.enc_pre1);
  all.insert(all.end(), a.enc_pre2.begin(), a.enc_pre2.end());
  all.insert(all.end(), a.head_pre.begin(), a.head_pre.end());
  return all;
}

template double forward_score<double>(EncoderKind, std::span<const double>, const ScorerInput&);
template long double forward_score<long double>(EncoderKind, std::span<const long double>,
                                                const ScorerInput&);
template std::vector<double> relu_preactivations<double>(EncoderKind, std::span<const double>,
                                                         const ScorerInput&);
template std::vector<long double> relu_preactivations<long double>(
    EncoderKind, std::span<const long double>, const ScorerInput&);

std::vector<double> encode(const ScorerModel& model, const RasterImage& image) {
  const ScorerInput in = make_input(model.encoder, image);
  return run_forward<double>(model.encoder, model.params, in).embedding;
}

double score_input(const ScorerModel& model, const ScorerInput& input) {
  return forward_score<double>(model.encoder, model.params, input);
}

double score(const ScorerModel& model, const RasterImage& image) {
  return score_input(model, make_input(model.encoder, image));
}

double pair_prob_from_scores(double score_a, double score_b) {
  return nn::sigmoid(score_a - score_b);
}

double pair_prob(const ScorerModel& model, const RasterImage& a, const RasterImage& b) {
  return pair_prob_from_scores(score(model, a), score(model, b));
}

double accumulate_gradient(const ScorerModel& model, const ScorerInput& input, double upstream,
                           std::span<double> grads) {
  const std::span<const double> p = model.params;
  const Activations<double> a = run_forward<double>(model.encoder, p, input);
  if (grads.size() != p.size()) {
    throw Error(ErrorKind::kInvalidArgument, "gradient buffer length mismatch");
  }
  if (upstream == 0.0) return a.score;
  const ParamLayout& l = param_layout(model.encoder);
  auto g = [&](std::size_t offset, std::size_t n) { return grads.subspan(offset, n); };

  // Head.
  const double d_score[1] = {upstream};
  std::vector<double> d_head_act(kHeadHidden, 0.0);
  nn::dense_backward<double>(p.subspan(l.head_w2, kHeadHidden), a.head_act, d_score,
                             g(l.head_w2, kHeadHidden), g(l.head_b2, 1), d_head_act);
  std::vector<double> d_head_pre(kHeadHidden);
  for (std::size_t i = 0; i < kHeadHidden; ++i) {
    d_head_pre[i] = a.head_pre[i] > 0.0 ? d_head_act[i] : 0.0;
  }
  std::vector<double> d_embedding(kEmbeddingSize, 0.0);
  nn::dense_backward<double>(p.subspan(l.head_w1, kHeadHidden * kEmbeddingSize), a.embedding,
                             d_head_pre, g(l.head_w1, kHeadHidden * kEmbeddingSize),
                             g(l.head_b1, kHeadHidden), d_embedding);

  if (model.encoder == EncoderKind::kFeatures) {
    std::vector<double> d_act1(kFeatureHidden, 0.0);
    nn::dense_backward<double>(p.subspan(l.enc_w2, kEmbeddingSize * kFeatureHidden), a.enc_act1,
                               d_embedding, g(l.enc_w2, kEmbeddingSize * kFeatureHidden),
                               g(l.enc_b2, kEmbeddingSize), d_act1);
    std::vector<double> d_pre1(kFeatureHidden);
    for (std::size_t i = 0; i < kFeatureHidden; ++i) {
      d_pre1[i] = a.enc_pre1[i] > 0.0 ? d_act1[i] : 0.0;
    }
    nn::dense_backward<double>(p.subspan(l.enc_w1, kFeatureHidden * kFeatureCount), a.input,
                               d_pre1, g(l.enc_w1, kFeatureHidden * kFeatureCount),
                               g(l.enc_b1, kFeatureHidden), {});
    return a.score;
  }

  const nn::ConvGeometry g1 = conv1_geometry(input);
  const nn::ConvGeometry g2 = conv2_geometry(input);
  const std::size_t plane = static_cast<std::size_t>(g2.out_height()) * g2.out_width();
  std::vector<double> d_pre2(a.enc_pre2.size());
  for (std::size_t c = 0; c < kEmbeddingSize; ++c) {
    const double d = d_embedding[c] / static_cast<double>(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      d_pre2[c * plane + i] = a.enc_pre2[c * plane + i] > 0.0 ? d : 0.0;
    }
  }
  std::vector<double> d_act1(a.enc_act1.size(), 0.0);
  nn::conv2d_backward<double>(p.subspan(l.enc_w2, g2.kernel_count()), g2, a.enc_act1, d_pre2,
                              g(l.enc_w2, g2.kernel_count()), g(l.enc_b2, kConv2Channels), d_act1);
  for (std::size_t i = 0; i < d_act1.size(); ++i) {
    if (!(a.enc_pre1[i] > 0.0)) d_act1[i] = 0.0;
  }
  nn::conv2d_backward<double>(p.subspan(l.enc_w1, g1.kernel_count()), g1, a.input, d_act1,
                              g(l.enc_w1, g1.kernel_count()), g(l.enc_b1, kConv1Channels), {});
  return a.score;
}

std::vector<double> backprop(const ScorerModel& model, std::span<const ScorerInput> inputs,
                             std::span<const double> upstream) {
  if (inputs.size() != upstream.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one upstream gradient per input required");
  }
  std::vector<double> grads(model.params.size(), 0.0);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    accumulate_gradient(model, inputs[i], upstream[i], grads);
  }
  return grads;
}

}  // namespace tidy
