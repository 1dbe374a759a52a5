// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "oracles.hpp"
#include "sculpt/errors.hpp"
#include "sculpt/evaluate.hpp"
#include "sculpt/trainer.hpp"

namespace sculpt {
namespace {

class TrainerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    TaskOptions to;
    to.seed = 5;
    task_ = new TaskSpec(make_tasks(to));
    base_ = new ToyModel(pretrain_base(5, *task_, Architecture{}, PretrainOptions{}));
  }
  static void TearDownTestSuite() {
    delete task_;
    delete base_;
  }

  static TrainConfig short_config() {
    TrainConfig c;
    c.total_steps = 300;
    c.warmup_steps = default_warmup(c.total_steps);
    c.seed = 5;
    return c;
  }

  static TaskSpec* task_;
  static ToyModel* base_;
};

TaskSpec* TrainerTest::task_ = nullptr;
ToyModel* TrainerTest::base_ = nullptr;

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.warmup_steps = c.total_steps;
  EXPECT_THROW(c.validate(), ConfigError);
  c.warmup_steps = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.retained_density = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(default_warmup(1500), 150u);
  EXPECT_EQ(default_warmup(5), 1u);
  EXPECT_EQ(default_warmup(11), 2u);
}

TEST(Model, BackwardMatchesFiniteDifferences) {
  RandomStream rng(3);
  Architecture arch;
  arch.input_dim = 4;
  arch.hidden_dims = {5, 3};
  arch.output_dim = 2;
  arch.rank = 2;
  ToyModel model = make_model(rng, arch);
  const Matrix x = sample_gaussian(rng, 6, 4, 1.0);
  const Matrix y = sample_gaussian(rng, 6, 2, 1.0);
  const ForwardCache cache = forward_cached(model, x);
  const auto grads = backward(model, cache, mse_grad(cache.outputs.back(), y));
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix fd = oracle::finite_difference(model.layers[l].w0, [&](const Matrix& w) {
      ToyModel m = model;
      m.layers[l].w0 = w;
      return mse(forward(m, x), y);
    });
    EXPECT_LT(oracle::max_relative_error(grads[l], fd), 1e-6) << "layer " << l;
  }
}

TEST(Model, Shapes) {
  RandomStream rng(1);
  const ToyModel m = make_model(rng, Architecture{});
  ASSERT_EQ(m.layers.size(), 3u);
  EXPECT_EQ(m.layers[0].role, LayerRole::connector);
  EXPECT_EQ(m.layers[1].role, LayerRole::llm);
  EXPECT_TRUE(m.layers[1].activation);
  EXPECT_FALSE(m.layers[2].activation);
  EXPECT_EQ(m.layers[2].w0.rows(), 8u);
  EXPECT_EQ(m.layers[0].w0.cols(), 16u);
}

TEST_F(TrainerTest, PretrainFitsSourceMixture) {
  const EvalReport e = evaluate(*base_, *task_);
  const double mix = std::accumulate(e.source_mse.begin(), e.source_mse.end(), 0.0) /
                     static_cast<double>(e.source_mse.size());
  EXPECT_LT(mix, 0.05);
  EXPECT_GT(e.source, e.target);
  for (const auto& ls : e.layers) EXPECT_EQ(ls.structural, 1.0);
}

TEST_F(TrainerTest, PretrainIsDeterministicAndAdaptersStartAtZero) {
  const ToyModel again = pretrain_base(5, *task_, Architecture{}, PretrainOptions{});
  for (std::size_t l = 0; l < base_->layers.size(); ++l) {
    EXPECT_TRUE(bitwise_equal(again.layers[l].w0, base_->layers[l].w0));
    EXPECT_EQ(delta_weight(base_->layers[l].adapter), Matrix::zeros(base_->layers[l].w0.rows(),
                                                                    base_->layers[l].w0.cols()));
  }
  // Output with adapters attached equals the plain W0 network.
  const Batch b = evaluation_batch(*task_, 0);
  Matrix h = b.x;
  for (const auto& layer : base_->layers) {
    h = oracle::naive_matmul(h, transpose(layer.w0));
    if (layer.activation)
      for (double& v : h.values()) v = std::tanh(v);
  }
  EXPECT_LT(oracle::max_abs_diff(forward(*base_, b.x), h), 1e-12);
}

TEST_F(TrainerTest, BaseWeightsFrozenAndMasksHeld) {
  const TrainConfig cfg = short_config();
  std::size_t checked = 0;
  const TrainResult r = train_lorasculpt(*base_, *task_, cfg, [&](std::size_t step, const ToyModel& m) {
    if (step < cfg.warmup_steps) {
      for (const auto& l : m.layers) ASSERT_FALSE(l.adapter.has_masks());
      return;
    }
    for (const auto& l : m.layers) {
      ASSERT_TRUE(l.adapter.has_masks());
      for (std::size_t i = 0; i < l.adapter.b.size(); ++i)
        if ((*l.adapter.mask_b)[i] == 0.0) ASSERT_EQ(l.adapter.b[i], 0.0) << "step " << step;
      for (std::size_t i = 0; i < l.adapter.a.size(); ++i)
        if ((*l.adapter.mask_a)[i] == 0.0) ASSERT_EQ(l.adapter.a[i], 0.0) << "step " << step;
    }
    ++checked;
  });
  EXPECT_EQ(checked, cfg.total_steps - cfg.warmup_steps + 1);
  ASSERT_EQ(r.trace.size(), cfg.total_steps);
  for (std::size_t l = 0; l < base_->layers.size(); ++l) {
    EXPECT_TRUE(bitwise_equal(r.model.layers[l].w0, base_->layers[l].w0));
    const auto& ad = r.model.layers[l].adapter;
    EXPECT_EQ(BinaryPattern::from_matrix(*ad.mask_a).popcount(),
              static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(ad.a.size()))));
  }
}

TEST_F(TrainerTest, TraceTotalsAddUp) {
  TrainConfig cfg = short_config();
  cfg.alpha = 0.01;
  cfg.beta = 0.001;
  const TrainResult r = train_lorasculpt(*base_, *task_, cfg);
  for (const auto& row : r.trace) {
    EXPECT_NEAR(row.total_loss, row.task_loss + cfg.alpha * row.cmr_frob + cfg.beta * row.cmr_l1, 1e-12);
  }
  EXPECT_LT(r.trace.back().task_loss, r.trace.front().task_loss);
}

TEST_F(TrainerTest, FullDensityWithoutRegulariserIsPlainLora) {
  TrainConfig sculpt = short_config();
  sculpt.retained_density = 1.0;
  sculpt.alpha = 0.0;
  sculpt.beta = 0.0;
  TrainConfig lora = sculpt;
  lora.baseline = Baseline::lora;
  const TrainResult a = train(*base_, *task_, sculpt);
  const TrainResult b = train(*base_, *task_, lora);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    ASSERT_EQ(std::memcmp(&a.trace[i].task_loss, &b.trace[i].task_loss, sizeof(double)), 0) << "step " << i;
    ASSERT_EQ(a.trace[i], b.trace[i]) << "step " << i;
  }
  for (std::size_t l = 0; l < a.model.layers.size(); ++l) {
    EXPECT_TRUE(bitwise_equal(a.model.layers[l].delta(), b.model.layers[l].delta()));
  }
}

TEST_F(TrainerTest, NumericBlowUpReportsStep) {
  TrainConfig cfg = short_config();
  cfg.learning_rate = 1e12;
  try {
    train(*base_, *task_, cfg);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_GE(e.step(), 1u);
    EXPECT_LE(e.step(), cfg.total_steps);
  }
}

TEST_F(TrainerTest, PosthocPruneAtFullDensityIsPlainLora) {
  TrainConfig lora = short_config();
  lora.baseline = Baseline::lora;
  TrainConfig pp = lora;
  pp.baseline = Baseline::posthoc_prune;
  pp.retained_density = 1.0;
  const TrainResult a = train(*base_, *task_, lora);
  const TrainResult b = train(*base_, *task_, pp);
  for (std::size_t l = 0; l < a.model.layers.size(); ++l) {
    EXPECT_TRUE(bitwise_equal(a.model.layers[l].effective_weight(), b.model.layers[l].effective_weight()));
  }
}

TEST_F(TrainerTest, PosthocPruneKeepsTopFraction) {
  TrainConfig pp = short_config();
  pp.baseline = Baseline::posthoc_prune;
  const TrainResult r = train(*base_, *task_, pp);
  for (const auto& l : r.model.layers) {
    ASSERT_TRUE(l.delta_override.has_value());
    EXPECT_NEAR(nonzero_fraction(*l.delta_override), 0.1, 0.5 / static_cast<double>(l.w0.size()));
  }
}

TEST_F(TrainerTest, DareZeroDropKeepsDelta) {
  TrainConfig lora = short_config();
  lora.baseline = Baseline::lora;
  TrainConfig dare = lora;
  dare.baseline = Baseline::dare;
  dare.dare_drop = 0.0;
  const TrainResult a = train(*base_, *task_, lora);
  const TrainResult b = train(*base_, *task_, dare);
  for (std::size_t l = 0; l < a.model.layers.size(); ++l) {
    EXPECT_TRUE(bitwise_equal(a.model.layers[l].delta(), b.model.layers[l].delta()));
  }
}

TEST(DropAndRescale, MeanConvergesAtTheBinomialRate) {
  // Each entry of the N-sample mean has variance d^2 p / ((1 - p) N), so the
  // relative Frobenius error concentrates at sqrt(p / ((1 - p) N)).
  RandomStream rng(21);
  const Matrix delta = sample_gaussian(rng, 32, 32, 1.0);
  for (int n : {200, 5000}) {
    Matrix mean(32, 32);
    for (int t = 0; t < n; ++t) axpy(mean, 1.0 / n, drop_and_rescale(delta, 0.5, rng));
    const double rel = frobenius_norm(subtract(mean, delta)) / frobenius_norm(delta);
    EXPECT_NEAR(rel, std::sqrt(1.0 / n), 0.15 * std::sqrt(1.0 / n)) << n << " samples";
  }
  const Matrix once = drop_and_rescale(delta, 0.5, rng);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_TRUE(once[i] == 0.0 || once[i] == 2.0 * delta[i]);
  EXPECT_TRUE(bitwise_equal(drop_and_rescale(delta, 0.0, rng), delta));
}

TEST(MagnitudePrune, KeepsLargest) {
  EXPECT_EQ(magnitude_prune(Matrix{{3, -1}, {0.5, 2}}, 0.5), (Matrix{{3, 0}, {0, 2}}));
}

TEST(Evaluate, ScoreTransformAndAggregates) {
  EXPECT_EQ(score_from_mse(0.0), 1.0);
  EXPECT_EQ(score_from_mse(1.0), 0.5);
  TaskOptions to;
  to.source_count = 2;
  const TaskSpec task = make_tasks(to);
  RandomStream rng(0);
  const ToyModel m = make_model(rng, Architecture{});
  const EvalReport e = evaluate(m, task);
  ASSERT_EQ(e.source_scores.size(), 2u);
  EXPECT_DOUBLE_EQ(e.source, (e.source_scores[0] + e.source_scores[1]) / 2);
  EXPECT_DOUBLE_EQ(e.avg, (e.source + e.target) / 2);
  EXPECT_DOUBLE_EQ(e.target, score_from_mse(e.target_mse));
}

}  // namespace
}  // namespace sculpt
