// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "sculpt/model.hpp"
#include "sculpt/tasks.hpp"

namespace sculpt {

inline constexpr std::size_t kEvalSamples = 1024;

struct LayerSparsity {
  std::size_t layer = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double structural = 1.0;
  /// 1 - (1 - s_B s_A)^r for masked adapters, 1 otherwise.
  double expected = 1.0;
};

/// Source = mean score over source tasks, Target = target score, Avg = their mean.
struct EvalReport {
  std::vector<double> source_mse;
  std::vector<double> source_scores;
  double target_mse = 0.0;
  double target_score = 0.0;
  double source = 0.0;
  double target = 0.0;
  double avg = 0.0;
  std::vector<LayerSparsity> layers;
};

/// 1 / (1 + mse): bounded, higher is better.
double score_from_mse(double mse) noexcept;

/// Fixed clean (noise-free) evaluation batch of kEvalSamples for one task.
Batch evaluation_batch(const TaskSpec& task, std::size_t task_index);
inline constexpr std::size_t kTargetTaskIndex = static_cast<std::size_t>(-1);

/// Per-layer structural sparsity of the applied delta: the mask-pattern
/// reachability for masked adapters, the nonzero fraction for dense
/// overrides, 1 for unmasked adapters.
std::vector<LayerSparsity> layer_sparsity(const ToyModel& model);

EvalReport evaluate(const ToyModel& model, const TaskSpec& task);

}  // namespace sculpt
