// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sculpt/evaluate.hpp"
#include "sculpt/run_config.hpp"

namespace sculpt::cli {

/// Stable process exit statuses.
enum ExitStatus : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

/// Entry point shared by main() and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Pretrained base, fine-tuned model and both evaluations for one config.
struct TrainingRun {
  ToyModel base;
  EvalReport base_eval;
  TrainResult result;
  EvalReport eval;
};

/// Runs pretrain (unless `base` is given) and fine-tuning for `cfg`.
TrainingRun run_training(const RunConfig& cfg, const ToyModel* base = nullptr);

/// "Source=... Target=... Avg=..." with six decimals.
std::string summary_line(const EvalReport& report);

/// Applies SCULPT_SEED from the environment, if set, to cfg.train.seed.
void apply_seed_override(RunConfig& cfg);

}  // namespace sculpt::cli
