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

#ifndef ASYMDET_TENSOR_H_
#define ASYMDET_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace asymdet {

// Dense rank-3 array in (channel, row, column) row-major order. A single
// image's feature map; there is no batch dimension.
class Tensor {
 public:
  // Zero-filled tensor. All extents must be >= 1.
  Tensor(std::size_t channels, std::size_t height, std::size_t width);
  // Takes ownership of `data`, which must hold channels*height*width finite
  // values.
  Tensor(std::size_t channels, std::size_t height, std::size_t width,
         std::vector<double> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane_size() const { return height_ * width_; }

  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }
  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * height_ + y) * width_ + x];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  std::span<const double> plane(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * plane_size(),
                                                  plane_size());
  }

  bool AllFinite() const;
  // "CxHxW", used in error messages.
  std::string ShapeString() const;

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t channels_;
  std::size_t height_;
  std::size_t width_;
  std::vector<double> data_;
};

// Row-major [rows x cols] matrix; rows index output channels.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Weights stored on disk as an (out, in, 1) tensor.
Matrix MatrixFromTensor(const Tensor& t);
Tensor TensorFromMatrix(const Matrix& m);

struct Window2d {
  std::size_t height;
  std::size_t width;
};

// Pointwise convolution: out(o, y, x) = bias[o] + sum_c weights(o, c) *
// in(c, y, x). Accumulates in double.
Tensor Conv1x1(const Tensor& input, const Matrix& weights,
               std::span<const double> bias);

// Elementwise x * sigmoid(x).
Tensor Silu(const Tensor& input);

// Valid (unpadded) mean pooling. Output extents are
// (H - kh) / sh + 1 by (W - kw) / sw + 1.
Tensor AvgPool(const Tensor& input, Window2d kernel, Window2d stride);

}  // namespace asymdet

#endif  // ASYMDET_TENSOR_H_
