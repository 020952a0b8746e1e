/* Copyright 2026 The asymdet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "asymdet/tensor.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "asymdet/error.h"

namespace asymdet {
namespace {

void CheckExtents(std::size_t c, std::size_t h, std::size_t w) {
  if (c == 0 || h == 0 || w == 0) {
    throw ShapeError("tensor extents", "all >= 1",
                     std::to_string(c) + "x" + std::to_string(h) + "x" +
                         std::to_string(w));
  }
}

void RequireFinite(const Tensor& t, std::string_view op) {
  if (!t.AllFinite()) {
    throw Error(ErrorKind::kValidation,
                std::string(op) + ": input contains non-finite values");
  }
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor::Tensor(std::size_t channels, std::size_t height, std::size_t width)
    : channels_(channels), height_(height), width_(width) {
  CheckExtents(channels, height, width);
  data_.assign(channels * height * width, 0.0);
}

Tensor::Tensor(std::size_t channels, std::size_t height, std::size_t width,
               std::vector<double> data)
    : channels_(channels),
      height_(height),
      width_(width),
      data_(std::move(data)) {
  CheckExtents(channels, height, width);
  if (data_.size() != channels * height * width) {
    throw ShapeError("tensor data length",
                     std::to_string(channels * height * width),
                     std::to_string(data_.size()));
  }
  if (!AllFinite()) {
    throw Error(ErrorKind::kValidation, "tensor data contains non-finite values");
  }
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  return std::to_string(channels_) + "x" + std::to_string(height_) + "x" +
         std::to_string(width_);
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length", std::to_string(rows * cols),
                     std::to_string(data_.size()));
  }
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix MatrixFromTensor(const Tensor& t) {
  if (t.width() != 1) {
    throw ShapeError("weight tensor", "(out, in, 1)", t.ShapeString());
  }
  return Matrix(t.channels(), t.height(),
                std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor TensorFromMatrix(const Matrix& m) {
  return Tensor(m.rows(), m.cols(), 1,
                std::vector<double>(m.data().begin(), m.data().end()));
}

Tensor Conv1x1(const Tensor& input, const Matrix& weights,
               std::span<const double> bias) {
  if (weights.cols() != input.channels()) {
    throw ShapeError("conv1x1 weight columns", std::to_string(input.channels()),
                     std::to_string(weights.cols()));
  }
  if (bias.size() != weights.rows()) {
    throw ShapeError("conv1x1 bias length", std::to_string(weights.rows()),
                     std::to_string(bias.size()));
  }
  RequireFinite(input, "conv1x1");

  const std::size_t plane = input.plane_size();
  Tensor out(weights.rows(), input.height(), input.width());
  std::vector<double> acc(plane);
  for (std::size_t o = 0; o < weights.rows(); ++o) {
    std::fill(acc.begin(), acc.end(), bias[o]);
    const auto w = weights.row(o);
    for (std::size_t c = 0; c < input.channels(); ++c) {
      const double wc = w[c];
      if (wc == 0.0) continue;
      const auto src = input.plane(c);
      for (std::size_t p = 0; p < plane; ++p) acc[p] += wc * src[p];
    }
    std::copy(acc.begin(), acc.end(),
              out.mutable_data().begin() + static_cast<std::ptrdiff_t>(o * plane));
  }
  return out;
}

Tensor Silu(const Tensor& input) {
  RequireFinite(input, "silu");
  Tensor out = input;
  for (double& v : out.mutable_data()) v = v * Sigmoid(v);
  return out;
}

Tensor AvgPool(const Tensor& input, Window2d kernel, Window2d stride) {
  if (kernel.height == 0 || kernel.width == 0 ||
      kernel.height > input.height() || kernel.width > input.width()) {
    throw ShapeError("avg_pool kernel",
                     "1.." + std::to_string(input.height()) + " x 1.." +
                         std::to_string(input.width()),
                     std::to_string(kernel.height) + "x" +
                         std::to_string(kernel.width));
  }
  if (stride.height == 0 || stride.width == 0) {
    throw Error(ErrorKind::kConfig, "avg_pool stride components must be >= 1");
  }
  RequireFinite(input, "avg_pool");

  const std::size_t out_h = (input.height() - kernel.height) / stride.height + 1;
  const std::size_t out_w = (input.width() - kernel.width) / stride.width + 1;
  const double inv_area =
      1.0 / static_cast<double>(kernel.height * kernel.width);
  Tensor out(input.channels(), out_h, out_w);
  for (std::size_t c = 0; c < input.channels(); ++c) {
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      const std::size_t y0 = oy * stride.height;
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        const std::size_t x0 = ox * stride.width;
        double sum = 0.0;
        for (std::size_t ky = 0; ky < kernel.height; ++ky) {
          for (std::size_t kx = 0; kx < kernel.width; ++kx) {
            sum += input.at(c, y0 + ky, x0 + kx);
          }
        }
        out.at(c, oy, ox) = sum * inv_area;
      }
    }
  }
  return out;
}

}  // namespace asymdet
