// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sculpt {

/// Dense row-major matrix of doubles.
///
/// All reductions in this module run in ascending index order so that results
/// are bitwise stable across platforms (the library is built with
/// -ffp-contract=off for the same reason).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 0.0); }
  static Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  /// "p x q", used in error messages.
  std::string shape_string() const;

  bool all_finite() const noexcept;

  /// Exact element-wise comparison (so +0.0 == -0.0).
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Matrix matmul(const Matrix& lhs, const Matrix& rhs);
/// lhs * rhs^T without materialising the transpose.
Matrix matmul_nt(const Matrix& lhs, const Matrix& rhs);
/// lhs^T * rhs without materialising the transpose.
Matrix matmul_tn(const Matrix& lhs, const Matrix& rhs);
Matrix transpose(const Matrix& x);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& x, double factor);
/// a += factor * b
void axpy(Matrix& a, double factor, const Matrix& b);

double sum_squares(const Matrix& x) noexcept;
double frobenius_norm(const Matrix& x) noexcept;
double l1_norm(const Matrix& x) noexcept;
/// Fraction of entries that are not exactly zero.
double nonzero_fraction(const Matrix& x) noexcept;

bool bitwise_equal(const Matrix& a, const Matrix& b) noexcept;

}  // namespace sculpt
