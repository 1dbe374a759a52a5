// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "sculpt/model.hpp"
#include "sculpt/regularizer.hpp"
#include "sculpt/retention.hpp"
#include "sculpt/tasks.hpp"

namespace sculpt {

enum class Baseline { lorasculpt, lora, l2reg, posthoc_prune, dare };

std::string_view to_string(Baseline baseline) noexcept;
Baseline parse_baseline(std::string_view text);

struct TrainConfig {
  std::size_t total_steps = 1500;
  /// Step at which the one-shot masks are built. Must satisfy 1 <= warmup < total.
  std::size_t warmup_steps = 150;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  double retained_density = 0.1;
  double omega = 1.0;
  double epsilon = 1e-8;
  double alpha = 1e-3;
  double beta = 1e-5;
  std::uint64_t seed = 0;
  Baseline baseline = Baseline::lorasculpt;
  /// One tag per layer; empty means connector layers -> l1, llm layers -> frobenius.
  std::vector<RegTag> reg_tags;
  WeightNorm retention_norm = WeightNorm::frobenius;
  double l2_lambda = 1e-3;
  double dare_drop = 0.5;

  /// Throws ConfigError on violated invariants.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// ceil(0.1 * total), at least 1.
std::size_t default_warmup(std::size_t total_steps) noexcept;

struct PretrainOptions {
  std::size_t steps = 4000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 64;

  friend bool operator==(const PretrainOptions&, const PretrainOptions&) = default;
};

struct TraceRow {
  std::size_t step = 0;
  double task_loss = 0.0;
  double cmr_frob = 0.0;
  double cmr_l1 = 0.0;
  double total_loss = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};
using TrainingTrace = std::vector<TraceRow>;

struct TrainResult {
  ToyModel model;
  TrainingTrace trace;
};

/// Called at the end of every fine-tuning step with the 1-based step index.
using StepObserver = std::function<void(std::size_t step, const ToyModel& model)>;

/// Trains every base weight by SGD with momentum on an even mixture of the
/// source tasks, then attaches zero-delta adapters. Throws TrainingError on a
/// non-finite loss.
ToyModel pretrain_base(std::uint64_t seed, const TaskSpec& task, const Architecture& arch,
                       const PretrainOptions& options);

/// Resolved per-layer tags (explicit or role defaults).
std::vector<RegTag> resolve_tags(const ToyModel& model, const TrainConfig& cfg);

/// Retention masks of every base weight.
std::vector<RetentionMask> retention_masks(const ToyModel& model, const TrainConfig& cfg);

/// Two-phase loop: regularised dense warmup, one-shot magnitude masks on every
/// adapter at step `warmup_steps`, then masked training with the masks held fixed.
TrainResult train_lorasculpt(ToyModel model, const TaskSpec& task, const TrainConfig& cfg,
                             const StepObserver& observer = {});

/// lora / l2reg train plain adapters; posthoc_prune and dare post-process a plain lora run.
TrainResult train_baseline(ToyModel model, const TaskSpec& task, const TrainConfig& cfg,
                           const StepObserver& observer = {});

/// Dispatches on cfg.baseline.
TrainResult train(ToyModel model, const TaskSpec& task, const TrainConfig& cfg,
                  const StepObserver& observer = {});

/// Keeps the round(s * n) largest-magnitude entries of a dense delta.
Matrix magnitude_prune(const Matrix& delta, double retained_density);

/// Drops each entry with probability p_drop and rescales survivors by 1 / (1 - p_drop).
Matrix drop_and_rescale(const Matrix& delta, double p_drop, RandomStream& rng);

}  // namespace sculpt
