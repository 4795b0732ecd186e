// Copyright 2026 The SplitMix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITMIX_TENSOR_H_
#define SPLITMIX_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace splitmix {

// Dense row-major tensor of doubles. Rank-2 tensors double as matrices whose
// rows are patches (smashed data) or tokens (activations).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, double fill = 0.0);
  Tensor(std::vector<size_t> shape, std::vector<double> data);

  static Tensor Matrix(size_t rows, size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor Vector(std::vector<double> values);

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t dim(size_t axis) const { return shape_.at(axis); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix accessors; only meaningful for rank 2.
  size_t rows() const { return shape_.at(0); }
  size_t cols() const { return shape_.at(1); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& operator()(size_t r, size_t c) { return data_[r * shape_[1] + c]; }
  double operator()(size_t r, size_t c) const {
    return data_[r * shape_[1] + c];
  }

  std::span<double> row(size_t r) {
    return std::span<double>(data_).subspan(r * shape_[1], shape_[1]);
  }
  std::span<const double> row(size_t r) const {
    return std::span<const double>(data_).subspan(r * shape_[1], shape_[1]);
  }

  Tensor Reshaped(std::vector<size_t> shape) const;
  void Fill(double value);
  bool AllFinite() const;
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string ShapeString() const;

  // Value equality (elementwise ==, so it is bitwise for finite non-zero
  // values).
  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

size_t ShapeProduct(const std::vector<size_t>& shape);

// a[m×k] · b[k×n].
Tensor MatMul(const Tensor& a, const Tensor& b);
// a[m×k] · b[n×k]ᵀ.
Tensor MatMulTransB(const Tensor& a, const Tensor& b);
// a[k×m]ᵀ · b[k×n].
Tensor MatMulTransA(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);

// Row-wise softmax with max subtraction.
Tensor SoftmaxRows(const Tensor& x);

void AddInPlace(Tensor& dst, const Tensor& src);
// dst += alpha * src
void Axpy(double alpha, const Tensor& src, Tensor& dst);
void ScaleInPlace(Tensor& t, double factor);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
// Adds a length-cols vector to every row.
void AddRowVector(Tensor& m, const Tensor& v);
// Sum over rows -> length-cols vector.
Tensor ColumnSums(const Tensor& m);
double SumSquares(const Tensor& t);
double MaxAbsDiff(const Tensor& a, const Tensor& b);

}  // namespace splitmix

#endif  // SPLITMIX_TENSOR_H_
