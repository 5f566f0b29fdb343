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

#include "tidy/nn.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "tidy/rng.h"

namespace tidy::nn {
namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

TEST(ActivationTest, Values) {
  EXPECT_EQ(relu(-1.0), 0.0);
  EXPECT_EQ(relu(2.0), 2.0);
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(1.0), 0.731058, 1e-6);
  EXPECT_NEAR(sigmoid(1.0), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_TRUE(std::isfinite(log_sigmoid(-1000.0)));
  EXPECT_DOUBLE_EQ(log_sigmoid(-1000.0), -1000.0);
  EXPECT_NEAR(-log_sigmoid(10.0), 4.5398899e-5, 1e-11);
}

TEST(DenseTest, Examples) {
  std::vector<double> out(2);
  const std::vector<double> w = {1, 2, 3, 4};
  dense_forward<double>(w, std::vector<double>{0, 0}, std::vector<double>{1, 1}, out);
  EXPECT_EQ(out, (std::vector<double>{3, 7}));

  const std::vector<double> identity = {1, 0, 0, 1};
  dense_forward<double>(identity, std::vector<double>{0, 0}, std::vector<double>{0.25, -2}, out);
  EXPECT_EQ(out, (std::vector<double>{0.25, -2}));

  dense_forward<double>(std::vector<double>(4, 0.0), std::vector<double>{5, -1},
                        std::vector<double>{9, 9}, out);
  EXPECT_EQ(out, (std::vector<double>{5, -1}));
}

TEST(DenseTest, ShapeMismatchThrows) {
  std::vector<double> out(2);
  EXPECT_TIDY_ERROR(dense_forward<double>(std::vector<double>(3, 0.0), std::vector<double>(2, 0.0),
                                          std::vector<double>(2, 0.0), out),
                    ErrorKind::kInvalidArgument);
  EXPECT_TIDY_ERROR(dense_forward<double>(std::vector<double>(4, 0.0), std::vector<double>(3, 0.0),
                                          std::vector<double>(2, 0.0), out),
                    ErrorKind::kInvalidArgument);
}

TEST(DenseTest, QuadraticLossGradientIsOuterProduct) {
  // L = 0.5 * |W x + b - t|^2, so dL/dW = e x^T and dL/db = e with e = W x + b - t.
  const std::vector<double> w = {0.5, -1.0, 2.0, 0.25};
  const std::vector<double> b = {0.1, -0.2};
  const std::vector<double> x = {3.0, -2.0};
  const std::vector<double> t = {1.0, 1.0};
  std::vector<double> y(2);
  dense_forward<double>(w, b, x, y);
  const std::vector<double> e = {y[0] - t[0], y[1] - t[1]};
  std::vector<double> gw(4, 0.0), gb(2, 0.0), gx(2, 0.0);
  dense_backward<double>(w, x, e, gw, gb, gx);
  EXPECT_DOUBLE_EQ(gw[0], e[0] * x[0]);
  EXPECT_DOUBLE_EQ(gw[1], e[0] * x[1]);
  EXPECT_DOUBLE_EQ(gw[2], e[1] * x[0]);
  EXPECT_DOUBLE_EQ(gw[3], e[1] * x[1]);
  EXPECT_EQ(gb, e);
  EXPECT_DOUBLE_EQ(gx[0], w[0] * e[0] + w[2] * e[1]);
  EXPECT_DOUBLE_EQ(gx[1], w[1] * e[0] + w[3] * e[1]);
}

TEST(DenseTest, ZeroUpstreamGivesZeroGradient) {
  Rng rng(1);
  const auto w = random_vector(12, rng);
  const auto x = random_vector(4, rng);
  std::vector<double> gw(12, 0.0), gb(3, 0.0), gx(4, 0.0);
  dense_backward<double>(w, x, std::vector<double>(3, 0.0), gw, gb, gx);
  for (double v : gw) EXPECT_EQ(v, 0.0);
  for (double v : gb) EXPECT_EQ(v, 0.0);
  for (double v : gx) EXPECT_EQ(v, 0.0);
}

// Direct transcription of strided, zero-padded cross-correlation.
std::vector<double> naive_conv(const std::vector<double>& k, const std::vector<double>& bias,
                               const std::vector<double>& in, int ic, int oc, int h, int w) {
  const int oh = (h + 1) / 2;
  const int ow = (w + 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(oc) * oh * ow);
  for (int o = 0; o < oc; ++o) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int c = 0; c < ic; ++c) {
          for (int ky = 0; ky < 5; ++ky) {
            for (int kx = 0; kx < 5; ++kx) {
              const int iy = 2 * y - 2 + ky;
              const int ix = 2 * x - 2 + kx;
              if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
              acc += k[((o * ic + c) * 5 + ky) * 5 + kx] * in[(c * h + iy) * w + ix];
            }
          }
        }
        out[(o * oh + y) * ow + x] = acc + bias[o];
      }
    }
  }
  return out;
}

TEST(ConvTest, ZeroInputGivesBias) {
  const ConvGeometry g{2, 3, 6, 7};
  Rng rng(2);
  const auto k = random_vector(g.kernel_count(), rng);
  const std::vector<double> bias = {0.5, -1.0, 2.0};
  std::vector<double> out(g.output_size());
  conv2d_forward<double>(k, bias, g, std::vector<double>(g.input_size(), 0.0), out);
  EXPECT_EQ(g.out_height(), 3);
  EXPECT_EQ(g.out_width(), 4);
  for (int o = 0; o < 3; ++o) {
    for (int i = 0; i < 12; ++i) EXPECT_EQ(out[o * 12 + i], bias[o]);
  }
}

TEST(ConvTest, CenterDeltaKernelSubsamples) {
  const ConvGeometry g{1, 1, 8, 8};
  std::vector<double> k(25, 0.0);
  k[2 * 5 + 2] = 1.0;
  std::vector<double> in(64);
  for (int i = 0; i < 64; ++i) in[i] = i;
  std::vector<double> out(g.output_size());
  conv2d_forward<double>(k, std::vector<double>{0.0}, g, in, out);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) EXPECT_EQ(out[y * 4 + x], in[(2 * y) * 8 + 2 * x]);
  }
}

TEST(ConvTest, MatchesNaiveLoop) {
  Rng rng(3);
  for (const ConvGeometry g : {ConvGeometry{3, 4, 8, 8}, ConvGeometry{2, 3, 7, 9}}) {
    const auto k = random_vector(g.kernel_count(), rng);
    const auto bias = random_vector(g.out_channels, rng);
    const auto in = random_vector(g.input_size(), rng);
    std::vector<double> out(g.output_size());
    conv2d_forward<double>(k, bias, g, in, out);
    const auto ref = naive_conv(k, bias, in, g.in_channels, g.out_channels, g.in_height,
                                g.in_width);
    ASSERT_EQ(out.size(), ref.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
  }
}

TEST(ConvTest, GemmPathMatchesReferenceLoops) {
  // double runs through patch matrices; long double keeps the direct loops.
  Rng rng(5);
  for (const ConvGeometry g : {ConvGeometry{3, 8, 16, 24}, ConvGeometry{8, 16, 5, 3},
                               ConvGeometry{1, 2, 1, 1}}) {
    const auto k = random_vector(g.kernel_count(), rng);
    const auto bias = random_vector(g.out_channels, rng);
    const auto in = random_vector(g.input_size(), rng);
    const auto go = random_vector(g.output_size(), rng);
    const std::vector<long double> kl(k.begin(), k.end()), bl(bias.begin(), bias.end()),
        il(in.begin(), in.end()), gol(go.begin(), go.end());

    std::vector<double> out(g.output_size());
    std::vector<long double> out_l(g.output_size());
    conv2d_forward<double>(k, bias, g, in, out);
    conv2d_forward<long double>(kl, bl, g, il, out_l);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], out_l[i], 1e-12);

    std::vector<double> gk(k.size(), 0.5), gb(bias.size(), 0.5), gx(in.size(), 0.5);
    std::vector<long double> gkl(k.size(), 0.5L), gbl(bias.size(), 0.5L), gxl(in.size(), 0.5L);
    conv2d_backward<double>(k, g, in, go, gk, gb, gx);
    conv2d_backward<long double>(kl, g, il, gol, gkl, gbl, gxl);
    for (std::size_t i = 0; i < gk.size(); ++i) EXPECT_NEAR(gk[i], gkl[i], 1e-12);
    for (std::size_t i = 0; i < gb.size(); ++i) EXPECT_NEAR(gb[i], gbl[i], 1e-12);
    for (std::size_t i = 0; i < gx.size(); ++i) EXPECT_NEAR(gx[i], gxl[i], 1e-12);

    // Without an input gradient only the parameter gradients accumulate.
    std::vector<double> gk2(k.size(), 0.5), gb2(bias.size(), 0.5);
    conv2d_backward<double>(k, g, in, go, gk2, gb2, {});
    EXPECT_EQ(gk2, gk);
    EXPECT_EQ(gb2, gb);
  }
}

TEST(ConvTest, ShapeMismatchThrows) {
  const ConvGeometry g{1, 1, 4, 4};
  std::vector<double> out(g.output_size());
  EXPECT_TIDY_ERROR(conv2d_forward<double>(std::vector<double>(24, 0.0), std::vector<double>{0.0},
                                           g, std::vector<double>(16, 0.0), out),
                    ErrorKind::kInvalidArgument);
  EXPECT_TIDY_ERROR(conv2d_forward<double>(std::vector<double>(25, 0.0), std::vector<double>{0.0},
                                           g, std::vector<double>(15, 0.0), out),
                    ErrorKind::kInvalidArgument);
}

TEST(ConvTest, BackwardMatchesFiniteDifferences) {
  // Loss = sum_j c_j * conv(x)_j is linear in kernels, bias and input, so
  // central differences are exact up to rounding.
  const ConvGeometry g{2, 3, 6, 5};
  Rng rng(4);
  const auto k = random_vector(g.kernel_count(), rng);
  const auto bias = random_vector(g.out_channels, rng);
  const auto in = random_vector(g.input_size(), rng);
  const auto c = random_vector(g.output_size(), rng);

  std::vector<double> gk(k.size(), 0.0), gb(bias.size(), 0.0), gx(in.size(), 0.0);
  conv2d_backward<double>(k, g, in, c, gk, gb, gx);

  auto loss_of = [&](const std::vector<long double>& kk, const std::vector<long double>& xx) {
    std::vector<long double> bb(bias.begin(), bias.end());
    std::vector<long double> out(g.output_size());
    conv2d_forward<long double>(kk, bb, g, xx, out);
    long double total = 0.0L;
    for (std::size_t j = 0; j < out.size(); ++j) total += c[j] * out[j];
    return total;
  };
  const std::vector<long double> xin(in.begin(), in.end());
  const std::vector<long double> kin(k.begin(), k.end());
  const LossFn wrt_kernels = [&](std::span<const long double> p) {
    return loss_of({p.begin(), p.end()}, xin);
  };
  const LossFn wrt_input = [&](std::span<const long double> p) {
    return loss_of(kin, {p.begin(), p.end()});
  };
  const auto nk = finite_diff_grad(wrt_kernels, k);
  const auto nx = finite_diff_grad(wrt_input, in);
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(gk[i], nk[i], 1e-9);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_NEAR(gx[i], nx[i], 1e-9);
  for (int o = 0; o < g.out_channels; ++o) {
    double expected = 0.0;
    for (int j = 0; j < g.out_height() * g.out_width(); ++j) {
      expected += c[o * g.out_height() * g.out_width() + j];
    }
    EXPECT_NEAR(gb[o], expected, 1e-12);
  }
}

TEST(AdamTest, ZeroGradientLeavesParamsAndDecaysMoments) {
  std::vector<double> p = {1.0, -2.0};
  AdamState s(2);
  s.first_moment = {0.5, -0.5};
  s.second_moment = {0.25, 0.25};
  adam_step(p, std::vector<double>{0.0, 0.0}, s);
  EXPECT_EQ(s.step_count, 1u);
  EXPECT_DOUBLE_EQ(s.first_moment[0], 0.45);
  EXPECT_DOUBLE_EQ(s.second_moment[0], 0.25 * 0.999);
  // With a nonzero carried first moment the update is not zero; a fresh
  // state with zero gradient must leave params unchanged.
  std::vector<double> q = {1.0, -2.0};
  AdamState fresh(2);
  adam_step(q, std::vector<double>{0.0, 0.0}, fresh);
  EXPECT_EQ(q, (std::vector<double>{1.0, -2.0}));
}

TEST(AdamTest, ConstantGradientStepApproachesLearningRate) {
  std::vector<double> p = {0.0, 0.0};
  AdamState s(2);
  const AdamConfig config{1e-3};
  double last_step = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double before = p[0];
    adam_step(p, std::vector<double>{0.3, -7.0}, s, config);
    last_step = std::fabs(p[0] - before);
    EXPECT_EQ(s.step_count, static_cast<std::uint64_t>(i + 1));
  }
  EXPECT_NEAR(last_step, 1e-3, 1e-7);
  EXPECT_NEAR(p[0], -2.0, 1e-3);
  EXPECT_NEAR(p[1], 2.0, 1e-3);
}

TEST(AdamTest, NonFiniteGradientIsRejectedWithoutSideEffects) {
  std::vector<double> p = {1.0, 2.0};
  AdamState s(2);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TIDY_ERROR(adam_step(p, std::vector<double>{0.1, nan}, s), ErrorKind::kNumericError);
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(s.step_count, 0u);
  EXPECT_TIDY_ERROR(adam_step(p, std::vector<double>{0.1}, s), ErrorKind::kInvalidArgument);
}

TEST(FiniteDiffTest, Examples) {
  const LossFn square = [](std::span<const long double> p) { return p[0] * p[0]; };
  EXPECT_NEAR(finite_diff_grad(square, std::vector<double>{3.0})[0], 6.0, 1e-6);

  const LossFn constant = [](std::span<const long double>) { return 4.0L; };
  for (double g : finite_diff_grad(constant, std::vector<double>{1.0, 2.0, 3.0})) {
    EXPECT_EQ(g, 0.0);
  }

  const LossFn linear = [](std::span<const long double> p) { return 2.5L * p[0] - 0.75L * p[1]; };
  const auto g = finite_diff_grad(linear, std::vector<double>{0.3, -1.1});
  EXPECT_NEAR(g[0], 2.5, 1e-12);
  EXPECT_NEAR(g[1], -0.75, 1e-12);
}

}  // namespace
}  // namespace tidy::nn
