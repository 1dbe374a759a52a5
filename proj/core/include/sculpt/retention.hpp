// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "sculpt/matrix.hpp"

namespace sculpt {

/// Normalisation applied to the pretrained weight before scoring.
enum class WeightNorm { frobenius, spectral };

std::string_view to_string(WeightNorm norm) noexcept;
WeightNorm parse_weight_norm(std::string_view text);

/// Per-entry protection strength in [0, 1) derived from pretrained weight magnitudes.
struct RetentionMask {
  Matrix m;
  double omega = 1.0;
  double epsilon = 1e-8;
  WeightNorm norm_used = WeightNorm::frobenius;
};

inline constexpr double kDefaultEpsilon = 1e-8;
inline constexpr double kDefaultOmega = 1.0;
/// Upper clamp on the logarithm's argument; keeps ln() strictly negative.
inline constexpr double kLogArgumentCeiling = 1.0 - 1e-6;
inline constexpr double kMaxImportance = 1e6;

/// Largest singular value by power iteration on W^T W.
double spectral_norm(const Matrix& w);

/// S_ij = |1 / ln(min(|W_ij| / ||W|| + eps, 1 - 1e-6))|, capped at 1e6.
///
/// Throws NormalizationError for an all-zero `w`, ParameterError for eps <= 0.
Matrix importance_scores(const Matrix& w, double epsilon = kDefaultEpsilon,
                         WeightNorm norm = WeightNorm::frobenius);

/// M_ij = tanh(omega * S_ij). Throws ParameterError for omega <= 0.
RetentionMask retention_mask(const Matrix& w, double omega = kDefaultOmega,
                             double epsilon = kDefaultEpsilon,
                             WeightNorm norm = WeightNorm::frobenius);

}  // namespace sculpt
