// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "sculpt/adapter.hpp"
#include "sculpt/matrix.hpp"
#include "sculpt/random.hpp"

namespace sculpt {

/// Connector layers bridge the (toy) encoder and the stack; llm layers are the rest.
enum class LayerRole { connector, llm };

std::string_view to_string(LayerRole role) noexcept;
LayerRole parse_layer_role(std::string_view text);

/// Frozen pretrained weight plus a trainable adapter. Weights map inputs of
/// size q = w0.cols() to outputs of size p = w0.rows().
struct Layer {
  Matrix w0;
  LoraAdapter adapter;
  LayerRole role = LayerRole::llm;
  bool activation = true;  // tanh after the affine map
  /// Dense delta replacing the adapter's B A (set by post-hoc baselines).
  std::optional<Matrix> delta_override;

  Matrix delta() const;
  Matrix effective_weight() const;
};

struct Architecture {
  std::size_t input_dim = 16;
  std::vector<std::size_t> hidden_dims{32, 32};
  std::size_t output_dim = 8;
  std::size_t rank = 8;
  double lora_scale = 1.0;
  /// The first `connector_layers` layers get the connector role.
  std::size_t connector_layers = 1;

  std::size_t layer_count() const noexcept { return hidden_dims.size() + 1; }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct ToyModel {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.front().w0.cols(); }
  std::size_t output_dim() const { return layers.back().w0.rows(); }
};

/// Random base weights (N(0, 1/fan_in)) and zero-delta adapters. Hidden layers
/// use tanh; the output layer is linear.
ToyModel make_model(RandomStream& rng, const Architecture& arch);

/// Re-initialises every adapter to zero delta (B = 0, A ~ N(0, 0.02^2)).
void reset_adapters(ToyModel& model, RandomStream& rng, std::size_t rank, double scale);

struct ForwardCache {
  std::vector<Matrix> inputs;   // input to layer l
  std::vector<Matrix> weights;  // effective weight used for layer l
  std::vector<Matrix> outputs;  // post-activation output of layer l
};

Matrix forward(const ToyModel& model, const Matrix& x);
ForwardCache forward_cached(const ToyModel& model, const Matrix& x);

/// Gradient of a scalar loss with respect to each layer's effective weight,
/// given d loss / d output.
std::vector<Matrix> backward(const ToyModel& model, const ForwardCache& cache, const Matrix& grad_output);

/// Mean over all entries of (pred - target)^2.
double mse(const Matrix& pred, const Matrix& target);
Matrix mse_grad(const Matrix& pred, const Matrix& target);

}  // namespace sculpt
