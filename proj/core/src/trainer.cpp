// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/trainer.hpp"

#include <cmath>
#include <string>

#include "sculpt/errors.hpp"

namespace sculpt {

namespace {

// Stream ids; distinct per purpose so that changing one consumer never shifts another.
constexpr std::uint64_t kPretrainInitStream = 0x5101;
constexpr std::uint64_t kPretrainDataStream = 0x5102;
constexpr std::uint64_t kAdapterInitStream = 0x5103;
constexpr std::uint64_t kFinetuneDataStream = 0x5201;
constexpr std::uint64_t kDareStream = 0x5301;

enum class Objective { sculpt, plain, l2 };

struct Velocity {
  Matrix b;
  Matrix a;
};

void check_finite(double loss, std::size_t step, const char* phase) {
  if (!std::isfinite(loss)) throw TrainingError(std::string(phase) + ": loss is not finite", step);
}

void momentum_step(Matrix& param, Matrix& velocity, const Matrix& grad, double lr, double mu) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = mu * velocity[i] + grad[i];
    param[i] -= lr * velocity[i];
  }
}

TrainResult run_adapter_training(ToyModel model, const TaskSpec& task, const TrainConfig& cfg,
                                 Objective objective, const StepObserver& observer) {
  cfg.validate();
  task.validate();
  const std::vector<RegTag> tags = resolve_tags(model, cfg);
  const std::vector<RetentionMask> retention = retention_masks(model, cfg);

  std::vector<Velocity> velocity;
  for (const auto& layer : model.layers) {
    velocity.push_back({Matrix::zeros(layer.adapter.b.rows(), layer.adapter.b.cols()),
                        Matrix::zeros(layer.adapter.a.rows(), layer.adapter.a.cols())});
  }

  RandomStream data_rng(cfg.seed, kFinetuneDataStream);
  TrainingTrace trace;
  trace.reserve(cfg.total_steps);
  const bool sparsify = objective == Objective::sculpt;

  for (std::size_t step = 1; step <= cfg.total_steps; ++step) {
    const bool masked_phase = sparsify && step >= cfg.warmup_steps;
    if (masked_phase) {
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        LoraAdapter& adapter = model.layers[l].adapter;
        if (step == cfg.warmup_steps) {
          prune_adapter(adapter, cfg.retained_density, cfg.retained_density);
        } else {
          apply_masks(adapter);
        }
        velocity[l].b = hadamard(*adapter.mask_b, velocity[l].b);
        velocity[l].a = hadamard(*adapter.mask_a, velocity[l].a);
      }
    }

    const Batch batch = sample_batch(task.target, data_rng, cfg.batch_size, task.noise);
    const ForwardCache cache = forward_cached(model, batch.x);
    const double task_loss = mse(cache.outputs.back(), batch.y);
    const std::vector<Matrix> weight_grads = backward(model, cache, mse_grad(cache.outputs.back(), batch.y));

    std::vector<double> frob_terms;
    std::vector<double> l1_terms;
    double l2_total = 0.0;
    std::vector<Matrix> grad_b(model.layers.size());
    std::vector<Matrix> grad_a(model.layers.size());

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      const LoraAdapter& adapter = model.layers[l].adapter;
      const Matrix& gw = weight_grads[l];
      grad_b[l] = matmul_nt(gw, adapter.a);
      grad_a[l] = matmul_tn(adapter.b, gw);
      if (adapter.scale != 1.0) {
        grad_b[l] = scaled(grad_b[l], adapter.scale);
        grad_a[l] = scaled(grad_a[l], adapter.scale);
      }

      // The penalty values are recorded for every objective; only lorasculpt
      // feeds their gradients back.
      if (tags[l] == RegTag::frobenius) {
        const RegGrad reg = cmr_frobenius_grad(retention[l], adapter);
        frob_terms.push_back(reg.loss);
        if (sparsify && cfg.alpha != 0.0) {
          axpy(grad_b[l], cfg.alpha, reg.grad_b);
          axpy(grad_a[l], cfg.alpha, reg.grad_a);
        }
      } else if (tags[l] == RegTag::l1) {
        const RegGrad reg = cmr_l1_grad(retention[l], adapter);
        l1_terms.push_back(reg.loss);
        if (sparsify && cfg.beta != 0.0) {
          axpy(grad_b[l], cfg.beta, reg.grad_b);
          axpy(grad_a[l], cfg.beta, reg.grad_a);
        }
      }

      if (objective == Objective::l2 && cfg.l2_lambda != 0.0) {
        // d/dB lambda ||BA||_F^2 = 2 lambda (BA) A^T, d/dA = 2 lambda B^T (BA).
        const Matrix product = unscaled_product(adapter);
        l2_total += cfg.l2_lambda * sum_squares(product);
        axpy(grad_b[l], 2.0 * cfg.l2_lambda, matmul_nt(product, adapter.a));
        axpy(grad_a[l], 2.0 * cfg.l2_lambda, matmul_tn(adapter.b, product));
      }
    }

    TraceRow row;
    row.step = step;
    row.task_loss = task_loss;
    for (double t : frob_terms) row.cmr_frob += t;
    for (double t : l1_terms) row.cmr_l1 += t;
    if (sparsify) {
      RegularizerConfig reg_cfg{cfg.alpha, cfg.beta, tags};
      row.total_loss = total_loss(task_loss, frob_terms, l1_terms, reg_cfg);
    } else {
      row.total_loss = task_loss + l2_total;
    }
    check_finite(row.total_loss, step, "fine-tune");

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      LoraAdapter& adapter = model.layers[l].adapter;
      momentum_step(adapter.b, velocity[l].b, grad_b[l], cfg.learning_rate, cfg.momentum);
      momentum_step(adapter.a, velocity[l].a, grad_a[l], cfg.learning_rate, cfg.momentum);
      if (masked_phase) apply_masks(adapter);
    }

    trace.push_back(row);
    if (observer) observer(step, model);
  }
  return {std::move(model), std::move(trace)};
}

}  // namespace

std::string_view to_string(Baseline baseline) noexcept {
  switch (baseline) {
    case Baseline::lora: return "lora";
    case Baseline::l2reg: return "l2reg";
    case Baseline::posthoc_prune: return "posthoc_prune";
    case Baseline::dare: return "dare";
    case Baseline::lorasculpt: break;
  }
  return "lorasculpt";
}

Baseline parse_baseline(std::string_view text) {
  if (text == "lorasculpt") return Baseline::lorasculpt;
  if (text == "lora") return Baseline::lora;
  if (text == "l2reg") return Baseline::l2reg;
  if (text == "posthoc_prune") return Baseline::posthoc_prune;
  if (text == "dare") return Baseline::dare;
  throw ParameterError("unknown baseline '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (total_steps < 2) throw ConfigError("total_steps must be >= 2");
  if (warmup_steps < 1 || warmup_steps >= total_steps) {
    throw ConfigError("warmup_steps must satisfy 1 <= warmup_steps < total_steps");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(retained_density > 0.0 && retained_density <= 1.0)) {
    throw ConfigError("retained_density must lie in (0, 1]");
  }
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("alpha and beta must be >= 0");
  if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be >= 0");
  if (!(dare_drop >= 0.0 && dare_drop < 1.0)) throw ConfigError("dare_drop must lie in [0, 1)");
}

std::size_t default_warmup(std::size_t total_steps) noexcept {
  const std::size_t w = (total_steps + 9) / 10;
  return w < 1 ? 1 : w;
}

ToyModel pretrain_base(std::uint64_t seed, const TaskSpec& task, const Architecture& arch,
                       const PretrainOptions& options) {
  task.validate();
  if (options.steps == 0) throw ConfigError("pretrain steps must be >= 1");
  if (arch.input_dim != task.input_dim() || arch.output_dim != task.output_dim()) {
    throw ConfigError("pretrain_base: architecture and task dimensions differ");
  }
  RandomStream init_rng(seed, kPretrainInitStream);
  ToyModel model = make_model(init_rng, arch);
  std::vector<Matrix> velocity;
  for (const auto& layer : model.layers) velocity.push_back(Matrix::zeros(layer.w0.rows(), layer.w0.cols()));

  RandomStream data_rng(seed, kPretrainDataStream);
  const std::size_t n_src = task.sources.size();
  const std::size_t per_task = std::max<std::size_t>(1, options.batch_size / n_src);
  for (std::size_t step = 1; step <= options.steps; ++step) {
    Batch mixed{Matrix(per_task * n_src, task.input_dim()), Matrix(per_task * n_src, task.output_dim())};
    for (std::size_t s = 0; s < n_src; ++s) {
      const Batch b = sample_batch(task.sources[s], data_rng, per_task, task.noise);
      for (std::size_t i = 0; i < per_task; ++i) {
        std::copy(b.x.row(i).begin(), b.x.row(i).end(), mixed.x.row(s * per_task + i).begin());
        std::copy(b.y.row(i).begin(), b.y.row(i).end(), mixed.y.row(s * per_task + i).begin());
      }
    }
    const ForwardCache cache = forward_cached(model, mixed.x);
    const double loss = mse(cache.outputs.back(), mixed.y);
    check_finite(loss, step, "pretrain");
    const auto grads = backward(model, cache, mse_grad(cache.outputs.back(), mixed.y));
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      momentum_step(model.layers[l].w0, velocity[l], grads[l], options.learning_rate, options.momentum);
    }
  }
  RandomStream adapter_rng(seed, kAdapterInitStream);
  reset_adapters(model, adapter_rng, arch.rank, arch.lora_scale);
  return model;
}

std::vector<RegTag> resolve_tags(const ToyModel& model, const TrainConfig& cfg) {
  if (!cfg.reg_tags.empty()) {
    if (cfg.reg_tags.size() != model.layers.size()) {
      throw ConfigError("reg_tags has " + std::to_string(cfg.reg_tags.size()) + " entries but the model has " +
                        std::to_string(model.layers.size()) + " layers");
    }
    return cfg.reg_tags;
  }
  std::vector<RegTag> tags;
  for (const auto& layer : model.layers) {
    tags.push_back(layer.role == LayerRole::connector ? RegTag::l1 : RegTag::frobenius);
  }
  return tags;
}

std::vector<RetentionMask> retention_masks(const ToyModel& model, const TrainConfig& cfg) {
  std::vector<RetentionMask> out;
  out.reserve(model.layers.size());
  for (const auto& layer : model.layers) {
    out.push_back(retention_mask(layer.w0, cfg.omega, cfg.epsilon, cfg.retention_norm));
  }
  return out;
}

TrainResult train_lorasculpt(ToyModel model, const TaskSpec& task, const TrainConfig& cfg,
                             const StepObserver& observer) {
  return run_adapter_training(std::move(model), task, cfg, Objective::sculpt, observer);
}

TrainResult train_baseline(ToyModel model, const TaskSpec& task, const TrainConfig& cfg,
                           const StepObserver& observer) {
  switch (cfg.baseline) {
    case Baseline::lorasculpt:
      return train_lorasculpt(std::move(model), task, cfg, observer);
    case Baseline::lora:
      return run_adapter_training(std::move(model), task, cfg, Objective::plain, observer);
    case Baseline::l2reg:
      return run_adapter_training(std::move(model), task, cfg, Objective::l2, observer);
    case Baseline::posthoc_prune: {
      TrainResult result = run_adapter_training(std::move(model), task, cfg, Objective::plain, observer);
      for (auto& layer : result.model.layers) {
        layer.delta_override = magnitude_prune(delta_weight(layer.adapter), cfg.retained_density);
      }
      return result;
    }
    case Baseline::dare: {
      TrainResult result = run_adapter_training(std::move(model), task, cfg, Objective::plain, observer);
      RandomStream rng(cfg.seed, kDareStream);
      for (auto& layer : result.model.layers) {
        layer.delta_override = drop_and_rescale(delta_weight(layer.adapter), cfg.dare_drop, rng);
      }
      return result;
    }
  }
  throw ConfigError("unhandled baseline");
}

TrainResult train(ToyModel model, const TaskSpec& task, const TrainConfig& cfg, const StepObserver& observer) {
  return train_baseline(std::move(model), task, cfg, observer);
}

Matrix magnitude_prune(const Matrix& delta, double retained_density) {
  return hadamard(build_mask(delta, retained_density), delta);
}

Matrix drop_and_rescale(const Matrix& delta, double p_drop, RandomStream& rng) {
  if (!(p_drop >= 0.0 && p_drop < 1.0)) throw ParameterError("drop_and_rescale: p_drop must lie in [0, 1)");
  if (p_drop == 0.0) return delta;
  const double keep_scale = 1.0 / (1.0 - p_drop);
  Matrix out(delta.rows(), delta.cols());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    out[i] = rng.bernoulli(p_drop) ? 0.0 : delta[i] * keep_scale;
  }
  return out;
}

}  // namespace sculpt
