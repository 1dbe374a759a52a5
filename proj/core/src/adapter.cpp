// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/adapter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sculpt/errors.hpp"

namespace sculpt {

std::size_t BinaryPattern::popcount() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

double BinaryPattern::density() const noexcept {
  return bits.empty() ? 0.0 : static_cast<double>(popcount()) / static_cast<double>(bits.size());
}

BinaryPattern BinaryPattern::from_matrix(const Matrix& x) {
  BinaryPattern out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out.bits[i] = x[i] != 0.0 ? 1 : 0;
  return out;
}

Matrix BinaryPattern::to_matrix() const {
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 1.0 : 0.0;
  return out;
}

Matrix build_mask(const Matrix& x, double retained_density) {
  if (!(retained_density >= 0.0 && retained_density <= 1.0)) {
    throw ParameterError("build_mask: retained density must lie in [0, 1], got " +
                         std::to_string(retained_density));
  }
  const std::size_t n = x.size();
  const auto keep = static_cast<std::size_t>(std::llround(retained_density * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial sort is enough; the comparator is a strict total order so the
  // selected set is unique.
  auto larger = [&x](std::size_t l, std::size_t r) {
    const double ml = std::abs(x[l]);
    const double mr = std::abs(x[r]);
    return ml > mr || (ml == mr && l < r);
  };
  if (keep < n) std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), larger);

  Matrix mask(x.rows(), x.cols());
  for (std::size_t i = 0; i < keep; ++i) mask[order[i]] = 1.0;
  return mask;
}

void apply_masks(LoraAdapter& adapter) {
  if (!adapter.has_masks()) throw StateError("apply_masks: adapter has no masks");
  adapter.b = hadamard(*adapter.mask_b, adapter.b);
  adapter.a = hadamard(*adapter.mask_a, adapter.a);
}

LoraAdapter masked(LoraAdapter adapter) {
  apply_masks(adapter);
  return adapter;
}

void prune_adapter(LoraAdapter& adapter, double density_b, double density_a) {
  adapter.mask_b = build_mask(adapter.b, density_b);
  adapter.mask_a = build_mask(adapter.a, density_a);
  adapter.density_b = density_b;
  adapter.density_a = density_a;
  apply_masks(adapter);
}

Matrix unscaled_product(const LoraAdapter& adapter) {
  if (adapter.has_masks()) {
    return matmul(hadamard(*adapter.mask_b, adapter.b), hadamard(*adapter.mask_a, adapter.a));
  }
  return matmul(adapter.b, adapter.a);
}

Matrix delta_weight(const LoraAdapter& adapter) {
  Matrix product = unscaled_product(adapter);
  if (adapter.scale != 1.0) product = scaled(product, adapter.scale);
  return product;
}

Matrix merge(const Matrix& w0, const LoraAdapter& adapter) {
  if (w0.rows() != adapter.out_dim() || w0.cols() != adapter.in_dim()) {
    throw DimensionError("merge: base weight is " + w0.shape_string() + " but adapter produces " +
                         std::to_string(adapter.out_dim()) + "x" + std::to_string(adapter.in_dim()));
  }
  return add(w0, delta_weight(adapter));
}

double structural_sparsity(const LoraAdapter& adapter) {
  if (!adapter.has_masks()) throw StateError("structural_sparsity: adapter has no masks");
  const Matrix& mb = *adapter.mask_b;
  const Matrix& ma = *adapter.mask_a;
  const std::size_t p = mb.rows(), r = mb.cols(), q = ma.cols();
  std::size_t reachable = 0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t k = 0; k < r; ++k) {
        if (mb(i, k) != 0.0 && ma(k, j) != 0.0) {
          ++reachable;
          break;
        }
      }
    }
  }
  return static_cast<double>(reachable) / static_cast<double>(p * q);
}

LoraAdapter init_adapter(RandomStream& rng, std::size_t p, std::size_t q, std::size_t rank,
                         double scale) {
  if (rank == 0 || rank > std::min(p, q)) {
    throw ParameterError("init_adapter: rank " + std::to_string(rank) + " invalid for " +
                         std::to_string(p) + "x" + std::to_string(q) + " weight");
  }
  if (!(scale > 0.0)) throw ParameterError("init_adapter: scale must be positive");
  LoraAdapter adapter;
  adapter.a = sample_gaussian(rng, rank, q, 0.02);
  adapter.b = Matrix::zeros(p, rank);
  adapter.scale = scale;
  return adapter;
}

}  // namespace sculpt
