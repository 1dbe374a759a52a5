// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sculpt/matrix.hpp"
#include "sculpt/random.hpp"

namespace sculpt {

/// Synthetic regression task: inputs x ~ N(input_mean, input_std^2 I) and
/// targets y = output * tanh(hidden * x).
struct Teacher {
  Matrix input_mean;  // 1 x input_dim
  double input_std = 1.0;
  Matrix hidden;      // teacher_hidden x input_dim
  Matrix output;      // output_dim x teacher_hidden
};

/// Source tasks stand in for upstream knowledge; the target is the downstream task.
struct TaskSpec {
  std::vector<Teacher> sources;
  Teacher target;
  double noise = 0.0;
  std::uint64_t seed = 0;

  std::size_t input_dim() const noexcept { return target.hidden.cols(); }
  std::size_t output_dim() const noexcept { return target.output.rows(); }
  /// Throws ConfigError if there are no sources or dimensions disagree.
  void validate() const;
};

struct TaskOptions {
  std::size_t input_dim = 16;
  std::size_t output_dim = 8;
  std::size_t source_count = 4;
  std::size_t teacher_hidden = 16;
  /// Norm of each task's input mean; tasks live in different regions of input space.
  double input_shift = 3.0;
  double input_std = 0.5;
  /// Standard deviation of teacher hidden weights, in units of 1/sqrt(input_dim).
  double teacher_gain = 1.0;
  double output_scale = 1.0;
  double noise = 0.05;
  std::uint64_t seed = 0;

  friend bool operator==(const TaskOptions&, const TaskOptions&) = default;
};

TaskSpec make_tasks(const TaskOptions& options);

struct Batch {
  Matrix x;  // n x input_dim
  Matrix y;  // n x output_dim
};

Matrix teacher_forward(const Teacher& teacher, const Matrix& x);
/// Draws n inputs and their teacher outputs, plus N(0, noise^2) label noise.
Batch sample_batch(const Teacher& teacher, RandomStream& rng, std::size_t n, double noise);

}  // namespace sculpt
