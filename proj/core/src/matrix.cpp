// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/matrix.hpp"

#include <cmath>
#include <cstring>

#include "sculpt/errors.hpp"

namespace sculpt {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw DimensionError("Matrix: " + std::to_string(values_.size()) +
                         " values supplied for shape " + shape_string());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer list");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix matmul(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw DimensionError("matmul: inner dimensions differ (" + lhs.shape_string() + " * " +
                         rhs.shape_string() + ")");
  }
  const std::size_t p = lhs.rows(), r = lhs.cols(), q = rhs.cols();
  Matrix out(p, q);
  // i-k-j order: each out(i, j) still accumulates over k in ascending order.
  for (std::size_t i = 0; i < p; ++i) {
    double* o = out.row(i).data();
    for (std::size_t k = 0; k < r; ++k) {
      const double a = lhs(i, k);
      const double* b = rhs.row(k).data();
      for (std::size_t j = 0; j < q; ++j) o[j] += a * b[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.cols()) {
    throw DimensionError("matmul_nt: inner dimensions differ (" + lhs.shape_string() + " * (" +
                         rhs.shape_string() + ")^T)");
  }
  const std::size_t p = lhs.rows(), r = lhs.cols(), q = rhs.rows();
  Matrix out(p, q);
  for (std::size_t i = 0; i < p; ++i) {
    const double* a = lhs.row(i).data();
    for (std::size_t j = 0; j < q; ++j) {
      const double* b = rhs.row(j).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < r; ++k) acc += a[k] * b[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows() != rhs.rows()) {
    throw DimensionError("matmul_tn: inner dimensions differ ((" + lhs.shape_string() +
                         ")^T * " + rhs.shape_string() + ")");
  }
  const std::size_t p = lhs.cols(), r = lhs.rows(), q = rhs.cols();
  Matrix out(p, q);
  for (std::size_t k = 0; k < r; ++k) {
    const double* a = lhs.row(k).data();
    const double* b = rhs.row(k).data();
    for (std::size_t i = 0; i < p; ++i) {
      double* o = out.row(i).data();
      const double ai = a[i];
      for (std::size_t j = 0; j < q; ++j) o[j] += ai * b[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& x) {
  Matrix out(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "subtract");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Matrix scaled(const Matrix& x, double factor) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * factor;
  return out;
}

void axpy(Matrix& a, double factor, const Matrix& b) {
  require_same_shape(a, b, "axpy");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += factor * b[i];
}

double sum_squares(const Matrix& x) noexcept {
  double acc = 0.0;
  for (double v : x.values()) acc += v * v;
  return acc;
}

double frobenius_norm(const Matrix& x) noexcept { return std::sqrt(sum_squares(x)); }

double l1_norm(const Matrix& x) noexcept {
  double acc = 0.0;
  for (double v : x.values()) acc += std::abs(v);
  return acc;
}

double nonzero_fraction(const Matrix& x) noexcept {
  if (x.empty()) return 0.0;
  std::size_t nz = 0;
  for (double v : x.values()) nz += (v != 0.0);
  return static_cast<double>(nz) / static_cast<double>(x.size());
}

bool bitwise_equal(const Matrix& a, const Matrix& b) noexcept {
  if (!a.same_shape(b)) return false;
  if (a.empty()) return true;
  return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace sculpt
