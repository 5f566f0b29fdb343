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

#include <Eigen/Core>

namespace tidy::nn {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

void require_conv_shapes(const ConvGeometry& g, std::size_t kernels, std::size_t input) {
  require(kernels == g.kernel_count(), "conv2d: kernel shape mismatch");
  require(input == g.input_size(), "conv2d: input shape mismatch");
}

// Unfolds the input into an [in_channels * 25] x [out_h * out_w] patch
// matrix; taps that land in the zero padding stay 0.
void im2col(const ConvGeometry& g, std::span<const double> input, std::vector<double>& cols) {
  constexpr int K = ConvGeometry::kKernel;
  constexpr int S = ConvGeometry::kStride;
  const int ow = g.out_width();
  const std::size_t patches = static_cast<std::size_t>(g.out_height()) * ow;
  const std::size_t in_plane = static_cast<std::size_t>(g.in_height) * g.in_width;
  cols.assign(static_cast<std::size_t>(g.in_channels) * K * K * patches, 0.0);
  double* dst = cols.data();
  for (int ic = 0; ic < g.in_channels; ++ic) {
    const double* plane = input.data() + ic * in_plane;
    for (int ky = 0; ky < K; ++ky) {
      const auto [y_lo, y_hi] = conv_tap_range(ky, g.in_height, g.out_height());
      for (int kx = 0; kx < K; ++kx, dst += patches) {
        const auto [x_lo, x_hi] = conv_tap_range(kx, g.in_width, ow);
        for (int oy = y_lo; oy < y_hi; ++oy) {
          const double* src = plane +
                              static_cast<std::ptrdiff_t>(oy * S + ky - ConvGeometry::kPad) *
                                  g.in_width +
                              (kx - ConvGeometry::kPad);
          double* row = dst + static_cast<std::size_t>(oy) * ow;
          for (int ox = x_lo; ox < x_hi; ++ox) row[ox] = src[S * ox];
        }
      }
    }
  }
}

// Scatter-adds a patch-matrix gradient back onto the input planes.
void col2im_add(const ConvGeometry& g, const std::vector<double>& cols, std::span<double> out) {
  constexpr int K = ConvGeometry::kKernel;
  constexpr int S = ConvGeometry::kStride;
  const int ow = g.out_width();
  const std::size_t patches = static_cast<std::size_t>(g.out_height()) * ow;
  const std::size_t in_plane = static_cast<std::size_t>(g.in_height) * g.in_width;
  const double* src = cols.data();
  for (int ic = 0; ic < g.in_channels; ++ic) {
    double* plane = out.data() + ic * in_plane;
    for (int ky = 0; ky < K; ++ky) {
      const auto [y_lo, y_hi] = conv_tap_range(ky, g.in_height, g.out_height());
      for (int kx = 0; kx < K; ++kx, src += patches) {
        const auto [x_lo, x_hi] = conv_tap_range(kx, g.in_width, ow);
        for (int oy = y_lo; oy < y_hi; ++oy) {
          double* dst = plane +
                        static_cast<std::ptrdiff_t>(oy * S + ky - ConvGeometry::kPad) *
                            g.in_width +
                        (kx - ConvGeometry::kPad);
          const double* row = src + static_cast<std::size_t>(oy) * ow;
          for (int ox = x_lo; ox < x_hi; ++ox) dst[S * ox] += row[ox];
        }
      }
    }
  }
}

}  // namespace

template <>
void conv2d_forward<double>(std::span<const double> kernels, std::span<const double> bias,
                            const ConvGeometry& g, std::span<const double> input,
                            std::span<double> output) {
  require_conv_shapes(g, kernels.size(), input.size());
  require(bias.size() == static_cast<std::size_t>(g.out_channels), "conv2d: bias shape mismatch");
  require(output.size() == g.output_size(), "conv2d: output shape mismatch");
  thread_local std::vector<double> cols;
  im2col(g, input, cols);
  const Eigen::Index rows = static_cast<Eigen::Index>(g.in_channels) * ConvGeometry::kKernel *
                            ConvGeometry::kKernel;
  const Eigen::Index patches = static_cast<Eigen::Index>(g.out_height()) * g.out_width();
  MatrixMap out(output.data(), g.out_channels, patches);
  out.noalias() = ConstMatrixMap(kernels.data(), g.out_channels, rows) *
                  ConstMatrixMap(cols.data(), rows, patches);
  out.colwise() += Eigen::Map<const Eigen::VectorXd>(bias.data(), g.out_channels);
}

template <>
void conv2d_backward<double>(std::span<const double> kernels, const ConvGeometry& g,
                             std::span<const double> input, std::span<const double> grad_output,
                             std::span<double> grad_kernels, std::span<double> grad_bias,
                             std::span<double> grad_input) {
  require_conv_shapes(g, kernels.size(), input.size());
  require(grad_kernels.size() == g.kernel_count(), "conv2d backward: kernel shape mismatch");
  require(grad_bias.size() == static_cast<std::size_t>(g.out_channels),
          "conv2d backward: bias shape mismatch");
  require(grad_output.size() == g.output_size(), "conv2d backward: output shape mismatch");
  require(grad_input.empty() || grad_input.size() == g.input_size(),
          "conv2d backward: input gradient shape mismatch");
  thread_local std::vector<double> cols;
  im2col(g, input, cols);
  const Eigen::Index rows = static_cast<Eigen::Index>(g.in_channels) * ConvGeometry::kKernel *
                            ConvGeometry::kKernel;
  const Eigen::Index patches = static_cast<Eigen::Index>(g.out_height()) * g.out_width();
  const ConstMatrixMap go(grad_output.data(), g.out_channels, patches);
  MatrixMap(grad_kernels.data(), g.out_channels, rows).noalias() +=
      go * ConstMatrixMap(cols.data(), rows, patches).transpose();
  Eigen::Map<Eigen::VectorXd>(grad_bias.data(), g.out_channels) += go.rowwise().sum();
  if (grad_input.empty()) return;
  // The patch buffer is reused for the patch-space input gradient.
  MatrixMap(cols.data(), rows, patches).noalias() =
      ConstMatrixMap(kernels.data(), g.out_channels, rows).transpose() * go;
  col2im_add(g, cols, grad_input);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
  require(grads.size() == params.size(), "adam: gradient length mismatch");
  require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "adam: state length mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Error(ErrorKind::kNumericError,
                  "non-finite gradient at parameter " + std::to_string(i));
    }
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g * g;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params,
                                     double h) {
  std::vector<long double> p(params.begin(), params.end());
  std::vector<double> grad(params.size(), 0.0);
  const long double step = h;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double saved = p[i];
    p[i] = saved + step;
    const long double up = loss(p);
    p[i] = saved - step;
    const long double down = loss(p);
    p[i] = saved;
    grad[i] = static_cast<double>((up - down) / (2.0L * step));
  }
  return grad;
}

}  // namespace tidy::nn
