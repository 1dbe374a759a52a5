// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/evaluate.hpp"

#include "sculpt/theory.hpp"

namespace sculpt {

namespace {
constexpr std::uint64_t kEvalStreamBase = 0xE7A10000;
}

double score_from_mse(double mse) noexcept { return 1.0 / (1.0 + mse); }

Batch evaluation_batch(const TaskSpec& task, std::size_t task_index) {
  const bool is_target = task_index == kTargetTaskIndex;
  const Teacher& teacher = is_target ? task.target : task.sources.at(task_index);
  RandomStream rng(task.seed, is_target ? kEvalStreamBase + 0xFFFF : kEvalStreamBase + task_index);
  return sample_batch(teacher, rng, kEvalSamples, 0.0);
}

std::vector<LayerSparsity> layer_sparsity(const ToyModel& model) {
  std::vector<LayerSparsity> out;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Layer& layer = model.layers[l];
    LayerSparsity ls;
    ls.layer = l;
    ls.rows = layer.w0.rows();
    ls.cols = layer.w0.cols();
    if (layer.delta_override) {
      ls.structural = nonzero_fraction(*layer.delta_override);
    } else if (layer.adapter.has_masks()) {
      ls.structural = structural_sparsity(layer.adapter);
      ls.expected = expected_product_sparsity(layer.adapter.density_b, layer.adapter.density_a,
                                              layer.adapter.rank());
    }
    out.push_back(ls);
  }
  return out;
}

EvalReport evaluate(const ToyModel& model, const TaskSpec& task) {
  EvalReport report;
  double sum = 0.0;
  for (std::size_t i = 0; i < task.sources.size(); ++i) {
    const Batch batch = evaluation_batch(task, i);
    const double err = mse(forward(model, batch.x), batch.y);
    report.source_mse.push_back(err);
    report.source_scores.push_back(score_from_mse(err));
    sum += report.source_scores.back();
  }
  const Batch target = evaluation_batch(task, kTargetTaskIndex);
  report.target_mse = mse(forward(model, target.x), target.y);
  report.target_score = score_from_mse(report.target_mse);
  report.source = sum / static_cast<double>(task.sources.size());
  report.target = report.target_score;
  report.avg = (report.source + report.target) / 2.0;
  report.layers = layer_sparsity(model);
  return report;
}

}  // namespace sculpt
