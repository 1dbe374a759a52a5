// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sculpt/matrix.hpp"
#include "sculpt/random.hpp"

namespace sculpt {

/// Low-rank update delta_W = scale * B A, with optional one-shot magnitude masks.
///
/// B is p x r and A is r x q. `density_b` / `density_a` are the retained
/// fractions the masks were built with (1.0 while no masks exist).
struct LoraAdapter {
  Matrix b;
  Matrix a;
  double scale = 1.0;
  std::optional<Matrix> mask_b;
  std::optional<Matrix> mask_a;
  double density_b = 1.0;
  double density_a = 1.0;

  std::size_t out_dim() const noexcept { return b.rows(); }
  std::size_t in_dim() const noexcept { return a.cols(); }
  std::size_t rank() const noexcept { return a.rows(); }
  bool has_masks() const noexcept { return mask_b.has_value() && mask_a.has_value(); }
};

/// One bit per entry, row-major.
struct BinaryPattern {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  BinaryPattern() = default;
  BinaryPattern(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

  bool at(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
  std::size_t popcount() const noexcept;
  double density() const noexcept;

  /// Nonzero entries of `x` become set bits.
  static BinaryPattern from_matrix(const Matrix& x);
  Matrix to_matrix() const;
};

/// Binary mask keeping the k = round(s * n) largest-magnitude entries of `x`.
/// Ties are broken towards the lower flat index. Throws ParameterError if s is outside [0, 1].
Matrix build_mask(const Matrix& x, double retained_density);

/// B <- mask_b (.) B and A <- mask_a (.) A. Throws StateError when masks are absent.
void apply_masks(LoraAdapter& adapter);
LoraAdapter masked(LoraAdapter adapter);

/// Builds both masks from the current factor magnitudes and applies them.
void prune_adapter(LoraAdapter& adapter, double density_b, double density_a);

/// B A without the scale factor, using masked factors when masks exist.
Matrix unscaled_product(const LoraAdapter& adapter);
Matrix delta_weight(const LoraAdapter& adapter);
Matrix merge(const Matrix& w0, const LoraAdapter& adapter);

/// Fraction of product positions (i, j) reachable through some k with
/// mask_b(i, k) and mask_a(k, j) both set. Throws StateError when masks are absent.
double structural_sparsity(const LoraAdapter& adapter);

/// A ~ N(0, 0.02^2), B = 0, no masks. Throws ParameterError if rank > min(p, q) or rank == 0.
LoraAdapter init_adapter(RandomStream& rng, std::size_t p, std::size_t q, std::size_t rank,
                         double scale = 1.0);

}  // namespace sculpt
