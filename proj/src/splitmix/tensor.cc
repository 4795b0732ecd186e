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

#include "splitmix/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "splitmix/error.h"

namespace splitmix {

size_t ShapeProduct(const std::vector<size_t>& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<size_t> shape, double fill)
    : shape_(std::move(shape)), data_(ShapeProduct(shape_), fill) {}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (ShapeProduct(shape_) != data_.size()) {
    ThrowShape("tensor data length " + std::to_string(data_.size()) +
               " does not match shape " + ShapeString());
  }
}

Tensor Tensor::Vector(std::vector<double> values) {
  const size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::Reshaped(std::vector<size_t> shape) const {
  return Tensor(std::move(shape), data_);
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) out << "x";
    out << shape_[i];
  }
  out << "]";
  return out.str();
}

namespace {

void RequireMatrix(const Tensor& t, const char* what) {
  if (t.rank() != 2) {
    ThrowShape(std::string(what) + " expects a matrix, got " + t.ShapeString());
  }
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.SameShape(b)) {
    ThrowShape(std::string(what) + ": shape mismatch " + a.ShapeString() +
               " vs " + b.ShapeString());
  }
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "MatMul");
  RequireMatrix(b, "MatMul");
  if (a.cols() != b.rows()) {
    ThrowShape("MatMul inner dimensions differ: " + a.ShapeString() + " · " +
               b.ShapeString());
  }
  const size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = Tensor::Matrix(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (size_t i = 0; i < m; ++i) {
    double* orow = po + i * n;
    for (size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      const double* brow = pb + p * n;
      for (size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

Tensor MatMulTransB(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "MatMulTransB");
  RequireMatrix(b, "MatMulTransB");
  if (a.cols() != b.cols()) {
    ThrowShape("MatMulTransB inner dimensions differ: " + a.ShapeString() +
               " · " + b.ShapeString() + "ᵀ");
  }
  const size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor out = Tensor::Matrix(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += pa[i * k + p] * pb[j * k + p];
      out(i, j) = acc;
    }
  }
  return out;
}

Tensor MatMulTransA(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "MatMulTransA");
  RequireMatrix(b, "MatMulTransA");
  if (a.rows() != b.rows()) {
    ThrowShape("MatMulTransA inner dimensions differ: " + a.ShapeString() +
               "ᵀ · " + b.ShapeString());
  }
  const size_t k = a.rows(), m = a.cols(), n = b.cols();
  Tensor out = Tensor::Matrix(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (size_t p = 0; p < k; ++p) {
    const double* arow = pa + p * m;
    const double* brow = pb + p * n;
    for (size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* orow = po + i * n;
      for (size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

Tensor Transpose(const Tensor& a) {
  RequireMatrix(a, "Transpose");
  Tensor out = Tensor::Matrix(a.cols(), a.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

Tensor SoftmaxRows(const Tensor& x) {
  RequireMatrix(x, "SoftmaxRows");
  Tensor out = x;
  for (size_t r = 0; r < x.rows(); ++r) {
    auto row = out.row(r);
    const double max = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - max);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return out;
}

void AddInPlace(Tensor& dst, const Tensor& src) {
  RequireSameShape(dst, src, "AddInPlace");
  auto d = dst.data();
  auto s = src.data();
  for (size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

void Axpy(double alpha, const Tensor& src, Tensor& dst) {
  RequireSameShape(dst, src, "Axpy");
  auto d = dst.data();
  auto s = src.data();
  for (size_t i = 0; i < d.size(); ++i) d[i] += alpha * s[i];
}

void ScaleInPlace(Tensor& t, double factor) {
  for (double& v : t.data()) v *= factor;
}

Tensor Add(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  AddInPlace(out, b);
  return out;
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Sub");
  Tensor out = a;
  auto o = out.data();
  auto s = b.data();
  for (size_t i = 0; i < o.size(); ++i) o[i] -= s[i];
  return out;
}

void AddRowVector(Tensor& m, const Tensor& v) {
  RequireMatrix(m, "AddRowVector");
  if (v.size() != m.cols()) {
    ThrowShape("AddRowVector: vector " + v.ShapeString() +
               " does not match matrix " + m.ShapeString());
  }
  for (size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (size_t c = 0; c < row.size(); ++c) row[c] += v[c];
  }
}

Tensor ColumnSums(const Tensor& m) {
  RequireMatrix(m, "ColumnSums");
  Tensor out({m.cols()});
  for (size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (size_t c = 0; c < row.size(); ++c) out[c] += row[c];
  }
  return out;
}

double SumSquares(const Tensor& t) {
  double acc = 0.0;
  for (double v : t.data()) acc += v * v;
  return acc;
}

double MaxAbsDiff(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "MaxAbsDiff");
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace splitmix
