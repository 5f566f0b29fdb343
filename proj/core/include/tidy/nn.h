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

#ifndef TIDY_NN_H_
#define TIDY_NN_H_

// Small differentiable kernel: dense and strided convolution layers with
// hand-written backward passes, activations, Adam and a finite-difference
// oracle. Layers are templated on the scalar type so the same code can be
// evaluated in long double by gradient checks.
//
// Backward functions ACCUMULATE into their gradient outputs; callers zero
// them first. Summation order is fixed so results are bitwise reproducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tidy/error.h"

namespace tidy::nn {

template <class T>
T relu(T x) {
  return x > T(0) ? x : T(0);
}

// Overflow-safe logistic function.
template <class T>
T sigmoid(T x) {
  if (x >= T(0)) {
    const T z = std::exp(-x);
    return T(1) / (T(1) + z);
  }
  const T z = std::exp(x);
  return z / (T(1) + z);
}

// log(sigmoid(x)) without overflow or cancellation.
template <class T>
T log_sigmoid(T x) {
  if (x >= T(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

inline void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::kInvalidArgument, what);
}

// output = weights * input + bias, weights row-major [output][input].
template <class T>
void dense_forward(std::span<const T> weights, std::span<const T> bias,
                   std::span<const T> input, std::span<T> output) {
  require(bias.size() == output.size(), "dense: bias/output size mismatch");
  require(weights.size() == output.size() * input.size(), "dense: weight shape mismatch");
  const std::size_t n_in = input.size();
  for (std::size_t o = 0; o < output.size(); ++o) {
    T acc = T(0);
    const T* row = weights.data() + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * input[i];
    output[o] = acc + bias[o];
  }
}

// grad_input may be empty when the input gradient is not needed.
template <class T>
void dense_backward(std::span<const T> weights, std::span<const T> input,
                    std::span<const T> grad_output, std::span<T> grad_weights,
                    std::span<T> grad_bias, std::span<T> grad_input) {
  const std::size_t n_in = input.size();
  const std::size_t n_out = grad_output.size();
  require(weights.size() == n_in * n_out && grad_weights.size() == weights.size(),
          "dense backward: weight shape mismatch");
  require(grad_bias.size() == n_out, "dense backward: bias shape mismatch");
  require(grad_input.empty() || grad_input.size() == n_in,
          "dense backward: input gradient shape mismatch");
  for (std::size_t o = 0; o < n_out; ++o) {
    const T g = grad_output[o];
    grad_bias[o] += g;
    if (g == T(0)) continue;
    T* gw = grad_weights.data() + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) gw[i] += g * input[i];
    if (!grad_input.empty()) {
      const T* row = weights.data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) grad_input[i] += g * row[i];
    }
  }
}

// 5x5 kernels, stride 2, zero padding 2. Tensors are [channel][row][col].
struct ConvGeometry {
  static constexpr int kKernel = 5;
  static constexpr int kStride = 2;
  static constexpr int kPad = 2;

  int in_channels = 0;
  int out_channels = 0;
  int in_height = 0;
  int in_width = 0;

  int out_height() const { return (in_height + 1) / 2; }
  int out_width() const { return (in_width + 1) / 2; }
  std::size_t kernel_count() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kKernel * kKernel;
  }
  std::size_t input_size() const {
    return static_cast<std::size_t>(in_channels) * in_height * in_width;
  }
  std::size_t output_size() const {
    return static_cast<std::size_t>(out_channels) * out_height() * out_width();
  }
};

// Output indices o with 0 <= o * stride + tap - pad < extent, as [lo, hi).
inline std::pair<int, int> conv_tap_range(int tap, int extent, int out_extent) {
  const int d = tap - ConvGeometry::kPad;
  const int lo = d >= 0 ? 0 : (1 - d) / 2;
  const int hi = extent - 1 - d < 0 ? 0 : std::min(out_extent, (extent - 1 - d) / 2 + 1);
  return {lo, std::max(lo, hi)};
}

// Cross-correlation. Each output value sums input channels, then kernel
// rows, then kernel columns, and adds the bias last. Loops run tap by tap
// over precomputed in-bounds ranges so the inner loop has no branches; the
// per-output summation order is unchanged.
template <class T>
void conv2d_forward(std::span<const T> kernels, std::span<const T> bias, const ConvGeometry& g,
                    std::span<const T> input, std::span<T> output) {
  require(kernels.size() == g.kernel_count(), "conv2d: kernel shape mismatch");
  require(bias.size() == static_cast<std::size_t>(g.out_channels), "conv2d: bias shape mismatch");
  require(input.size() == g.input_size(), "conv2d: input shape mismatch");
  require(output.size() == g.output_size(), "conv2d: output shape mismatch");
  constexpr int K = ConvGeometry::kKernel;
  constexpr int S = ConvGeometry::kStride;
  const int oh = g.out_height();
  const int ow = g.out_width();
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
  const std::size_t in_plane = static_cast<std::size_t>(g.in_height) * g.in_width;
  for (int oc = 0; oc < g.out_channels; ++oc) {
    T* out = output.data() + oc * out_plane;
    std::fill(out, out + out_plane, T(0));
    for (int ic = 0; ic < g.in_channels; ++ic) {
      const T* k = kernels.data() + (static_cast<std::size_t>(oc) * g.in_channels + ic) * K * K;
      const T* plane = input.data() + ic * in_plane;
      for (int ky = 0; ky < K; ++ky) {
        const auto [y_lo, y_hi] = conv_tap_range(ky, g.in_height, oh);
        for (int kx = 0; kx < K; ++kx) {
          const auto [x_lo, x_hi] = conv_tap_range(kx, g.in_width, ow);
          const T w = k[ky * K + kx];
          for (int oy = y_lo; oy < y_hi; ++oy) {
            const T* in_row = plane + static_cast<std::ptrdiff_t>(oy * S + ky - ConvGeometry::kPad) *
                                          g.in_width + (kx - ConvGeometry::kPad);
            T* out_row = out + static_cast<std::size_t>(oy) * ow;
            for (int ox = x_lo; ox < x_hi; ++ox) out_row[ox] += w * in_row[S * ox];
          }
        }
      }
    }
    for (std::size_t i = 0; i < out_plane; ++i) out[i] += bias[oc];
  }
}

// grad_input may be empty when the input gradient is not needed.
template <class T>
void conv2d_backward(std::span<const T> kernels, const ConvGeometry& g, std::span<const T> input,
                     std::span<const T> grad_output, std::span<T> grad_kernels,
                     std::span<T> grad_bias, std::span<T> grad_input) {
  require(kernels.size() == g.kernel_count() && grad_kernels.size() == g.kernel_count(),
          "conv2d backward: kernel shape mismatch");
  require(grad_bias.size() == static_cast<std::size_t>(g.out_channels),
          "conv2d backward: bias shape mismatch");
  require(input.size() == g.input_size(), "conv2d backward: input shape mismatch");
  require(grad_output.size() == g.output_size(), "conv2d backward: output shape mismatch");
  require(grad_input.empty() || grad_input.size() == g.input_size(),
          "conv2d backward: input gradient shape mismatch");
  constexpr int K = ConvGeometry::kKernel;
  constexpr int S = ConvGeometry::kStride;
  const int oh = g.out_height();
  const int ow = g.out_width();
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
  const std::size_t in_plane = static_cast<std::size_t>(g.in_height) * g.in_width;
  for (int oc = 0; oc < g.out_channels; ++oc) {
    const T* go = grad_output.data() + oc * out_plane;
    for (std::size_t i = 0; i < out_plane; ++i) grad_bias[oc] += go[i];
    for (int ic = 0; ic < g.in_channels; ++ic) {
      const std::size_t kbase = (static_cast<std::size_t>(oc) * g.in_channels + ic) * K * K;
      const T* plane = input.data() + ic * in_plane;
      T* gplane = grad_input.empty() ? nullptr : grad_input.data() + ic * in_plane;
      for (int ky = 0; ky < K; ++ky) {
        const auto [y_lo, y_hi] = conv_tap_range(ky, g.in_height, oh);
        for (int kx = 0; kx < K; ++kx) {
          const auto [x_lo, x_hi] = conv_tap_range(kx, g.in_width, ow);
          const std::ptrdiff_t shift = kx - ConvGeometry::kPad;
          const T w = kernels[kbase + ky * K + kx];
          T gw = T(0);
          for (int oy = y_lo; oy < y_hi; ++oy) {
            const std::ptrdiff_t row =
                static_cast<std::ptrdiff_t>(oy * S + ky - ConvGeometry::kPad) * g.in_width + shift;
            const T* go_row = go + static_cast<std::size_t>(oy) * ow;
            const T* in_row = plane + row;
            for (int ox = x_lo; ox < x_hi; ++ox) gw += go_row[ox] * in_row[S * ox];
            if (gplane != nullptr) {
              T* g_row = gplane + row;
              for (int ox = x_lo; ox < x_hi; ++ox) g_row[S * ox] += go_row[ox] * w;
            }
          }
          grad_kernels[kbase + ky * K + kx] += gw;
        }
      }
    }
  }
}

// Double precision runs as im2col + GEMM; the loops above stay as the long
// double reference that gradient checks evaluate.
template <>
void conv2d_forward<double>(std::span<const double> kernels, std::span<const double> bias,
                            const ConvGeometry& g, std::span<const double> input,
                            std::span<double> output);
template <>
void conv2d_backward<double>(std::span<const double> kernels, const ConvGeometry& g,
                             std::span<const double> input, std::span<const double> grad_output,
                             std::span<double> grad_kernels, std::span<double> grad_bias,
                             std::span<double> grad_input);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;

  explicit AdamState(std::size_t n = 0) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

// Bias-corrected Adam update in place. Throws kNumericError on a non-finite
// gradient (parameters and state are left untouched) and kInvalidArgument on
// length mismatch.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config = {});

// Central differences (f(p + h) - f(p - h)) / 2h per coordinate, evaluated
// in long double.
using LossFn = std::function<long double(std::span<const long double>)>;
std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params,
                                     double h = 1e-4);

}  // namespace tidy::nn

#endif  // TIDY_NN_H_
