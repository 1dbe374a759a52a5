// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/tasks.hpp"

#include <cmath>

#include "sculpt/errors.hpp"

namespace sculpt {

namespace {

Teacher make_teacher(RandomStream& rng, const TaskOptions& o) {
  Teacher t;
  Matrix dir = sample_gaussian(rng, 1, o.input_dim, 1.0);
  const double norm = frobenius_norm(dir);
  t.input_mean = scaled(dir, norm > 0.0 ? o.input_shift / norm : 0.0);
  t.input_std = o.input_std;
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(o.input_dim));
  t.hidden = sample_gaussian(rng, o.teacher_hidden, o.input_dim, o.teacher_gain * in_scale);
  t.output = sample_gaussian(rng, o.output_dim, o.teacher_hidden,
                             o.output_scale / std::sqrt(static_cast<double>(o.teacher_hidden)));
  return t;
}

}  // namespace

void TaskSpec::validate() const {
  if (sources.empty()) throw ConfigError("TaskSpec: at least one source task is required");
  for (const auto& s : sources) {
    if (s.hidden.cols() != input_dim() || s.output.rows() != output_dim()) {
      throw ConfigError("TaskSpec: source teacher dimensions differ from the target teacher");
    }
  }
}

TaskSpec make_tasks(const TaskOptions& options) {
  if (options.source_count == 0) throw ConfigError("make_tasks: source_count must be >= 1");
  TaskSpec spec;
  spec.seed = options.seed;
  spec.noise = options.noise;
  for (std::size_t i = 0; i < options.source_count; ++i) {
    RandomStream rng(options.seed, 0x7a5c0000 + i);
    spec.sources.push_back(make_teacher(rng, options));
  }
  RandomStream rng(options.seed, 0x7a5cffff);
  spec.target = make_teacher(rng, options);
  return spec;
}

Matrix teacher_forward(const Teacher& teacher, const Matrix& x) {
  Matrix h = matmul_nt(x, teacher.hidden);
  for (double& v : h.values()) v = std::tanh(v);
  return matmul_nt(h, teacher.output);
}

Batch sample_batch(const Teacher& teacher, RandomStream& rng, std::size_t n, double noise) {
  const std::size_t d = teacher.input_mean.cols();
  Batch batch;
  batch.x = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      batch.x(i, j) = teacher.input_mean(0, j) + teacher.input_std * rng.normal();
  batch.y = teacher_forward(teacher, batch.x);
  if (noise > 0.0) {
    for (double& v : batch.y.values()) v += noise * rng.normal();
  }
  return batch;
}

}  // namespace sculpt
