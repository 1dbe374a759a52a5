// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/retention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sculpt/errors.hpp"

namespace sculpt {

std::string_view to_string(WeightNorm norm) noexcept {
  return norm == WeightNorm::spectral ? "spectral" : "frobenius";
}

WeightNorm parse_weight_norm(std::string_view text) {
  if (text == "frobenius") return WeightNorm::frobenius;
  if (text == "spectral") return WeightNorm::spectral;
  throw ParameterError("unknown weight norm '" + std::string(text) + "'");
}

double spectral_norm(const Matrix& w) {
  if (w.empty()) return 0.0;
  // Deterministic start vector; iterate v <- W^T W v until the Rayleigh quotient settles.
  Matrix v(w.cols(), 1, 1.0 / std::sqrt(static_cast<double>(w.cols())));
  double sigma = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    Matrix wv = matmul(w, v);
    Matrix next = matmul_tn(w, wv);
    const double norm = frobenius_norm(next);
    if (norm == 0.0) return frobenius_norm(wv);
    v = scaled(next, 1.0 / norm);
    const double estimate = std::sqrt(norm);
    if (std::abs(estimate - sigma) <= 1e-14 * estimate) {
      sigma = estimate;
      break;
    }
    sigma = estimate;
  }
  return frobenius_norm(matmul(w, v));
}

Matrix importance_scores(const Matrix& w, double epsilon, WeightNorm norm) {
  if (!(epsilon > 0.0)) throw ParameterError("importance_scores: epsilon must be positive");
  const double scale = norm == WeightNorm::spectral ? spectral_norm(w) : frobenius_norm(w);
  if (!(scale > 0.0)) throw NormalizationError("importance_scores: weight matrix is all zero");

  Matrix scores(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = std::min(std::abs(w[i]) / scale + epsilon, kLogArgumentCeiling);
    scores[i] = std::min(std::abs(1.0 / std::log(x)), kMaxImportance);
  }
  return scores;
}

RetentionMask retention_mask(const Matrix& w, double omega, double epsilon, WeightNorm norm) {
  if (!(omega > 0.0)) throw ParameterError("retention_mask: omega must be positive");
  RetentionMask out;
  out.m = importance_scores(w, epsilon, norm);
  for (double& v : out.m.values()) v = std::tanh(omega * v);
  out.omega = omega;
  out.epsilon = epsilon;
  out.norm_used = norm;
  return out;
}

}  // namespace sculpt
