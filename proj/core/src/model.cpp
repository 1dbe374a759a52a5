// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/model.hpp"

#include <cmath>
#include <string>

#include "sculpt/errors.hpp"

namespace sculpt {

std::string_view to_string(LayerRole role) noexcept {
  return role == LayerRole::connector ? "connector" : "llm";
}

LayerRole parse_layer_role(std::string_view text) {
  if (text == "connector") return LayerRole::connector;
  if (text == "llm") return LayerRole::llm;
  throw ParameterError("unknown layer role '" + std::string(text) + "'");
}

Matrix Layer::delta() const {
  if (delta_override) return *delta_override;
  return delta_weight(adapter);
}

Matrix Layer::effective_weight() const { return add(w0, delta()); }

ToyModel make_model(RandomStream& rng, const Architecture& arch) {
  if (arch.input_dim == 0 || arch.output_dim == 0) throw ParameterError("make_model: zero dimension");
  std::vector<std::size_t> dims{arch.input_dim};
  dims.insert(dims.end(), arch.hidden_dims.begin(), arch.hidden_dims.end());
  dims.push_back(arch.output_dim);

  ToyModel model;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    const std::size_t q = dims[l], p = dims[l + 1];
    layer.w0 = sample_gaussian(rng, p, q, 1.0 / std::sqrt(static_cast<double>(q)));
    layer.role = l < arch.connector_layers ? LayerRole::connector : LayerRole::llm;
    layer.activation = l + 2 < dims.size();
    model.layers.push_back(std::move(layer));
  }
  reset_adapters(model, rng, arch.rank, arch.lora_scale);
  return model;
}

void reset_adapters(ToyModel& model, RandomStream& rng, std::size_t rank, double scale) {
  for (auto& layer : model.layers) {
    layer.adapter = init_adapter(rng, layer.w0.rows(), layer.w0.cols(), rank, scale);
    layer.delta_override.reset();
  }
}

ForwardCache forward_cached(const ToyModel& model, const Matrix& x) {
  ForwardCache cache;
  Matrix h = x;
  for (const auto& layer : model.layers) {
    cache.inputs.push_back(h);
    cache.weights.push_back(layer.effective_weight());
    Matrix z = matmul_nt(h, cache.weights.back());
    if (layer.activation) {
      for (double& v : z.values()) v = std::tanh(v);
    }
    cache.outputs.push_back(z);
    h = std::move(z);
  }
  return cache;
}

Matrix forward(const ToyModel& model, const Matrix& x) {
  Matrix h = x;
  for (const auto& layer : model.layers) {
    h = matmul_nt(h, layer.effective_weight());
    if (layer.activation) {
      for (double& v : h.values()) v = std::tanh(v);
    }
  }
  return h;
}

std::vector<Matrix> backward(const ToyModel& model, const ForwardCache& cache, const Matrix& grad_output) {
  const std::size_t n = model.layers.size();
  std::vector<Matrix> grads(n);
  Matrix upstream = grad_output;
  for (std::size_t li = n; li-- > 0;) {
    const Layer& layer = model.layers[li];
    Matrix dz = upstream;
    if (layer.activation) {
      const Matrix& out = cache.outputs[li];
      for (std::size_t i = 0; i < dz.size(); ++i) dz[i] *= 1.0 - out[i] * out[i];
    }
    grads[li] = matmul_tn(dz, cache.inputs[li]);
    if (li > 0) upstream = matmul(dz, cache.weights[li]);
  }
  return grads;
}

double mse(const Matrix& pred, const Matrix& target) {
  if (!pred.same_shape(target)) {
    throw DimensionError("mse: " + pred.shape_string() + " vs " + target.shape_string());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

Matrix mse_grad(const Matrix& pred, const Matrix& target) {
  Matrix g = subtract(pred, target);
  const double k = 2.0 / static_cast<double>(pred.size());
  for (double& v : g.values()) v *= k;
  return g;
}

}  // namespace sculpt
