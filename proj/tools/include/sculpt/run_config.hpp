// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sculpt/model.hpp"
#include "sculpt/tasks.hpp"
#include "sculpt/theory.hpp"
#include "sculpt/trainer.hpp"

namespace sculpt::cli {

struct SweepAxis {
  std::string param;  // s | alpha | omega | beta
  std::vector<double> values;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

/// Everything a run needs. Task dimensions follow `arch`, and the task
/// universe is generated from `train.seed`.
struct RunConfig {
  TrainConfig train;
  Architecture arch;
  TaskOptions task;
  PretrainOptions pretrain;
  SparsitySpec theory{256, 256, 16, 0.1, 0.1, SamplingMode::bernoulli, -1.0};
  std::size_t theory_trials = 200;
  double theory_delta = 0.1;
  std::optional<SweepAxis> sweep;
  std::string out_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Task options with dimensions and seed filled in from arch / train.
  TaskOptions resolved_task() const;
};

/// Defaults used by configs/default.cfg.
RunConfig default_run_config();

/// Parses "key = value" lines ('#' starts a comment). Every training key is
/// required; theory_*, sweep_* and out_dir are optional. Throws ConfigError
/// listing every unknown, missing or malformed key.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Writes every key, training keys first, in a fixed order.
void write_run_config(std::ostream& out, const RunConfig& cfg);
std::string to_text(const RunConfig& cfg);

/// Names of the keys `parse_run_config` insists on.
std::vector<std::string> required_keys();

/// Sets the swept parameter on `cfg`. Throws ConfigError for unknown names.
void apply_sweep_value(RunConfig& cfg, const std::string& param, double value);
bool is_sweep_param(const std::string& param);

}  // namespace sculpt::cli
