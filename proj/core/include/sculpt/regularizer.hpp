// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sculpt/adapter.hpp"
#include "sculpt/matrix.hpp"
#include "sculpt/retention.hpp"

namespace sculpt {

/// Which conflict-mitigation penalty a layer carries.
enum class RegTag { none, frobenius, l1 };

std::string_view to_string(RegTag tag) noexcept;
RegTag parse_reg_tag(std::string_view text);

struct RegularizerConfig {
  double alpha = 1e-3;  // weight of the Frobenius (LLM-role) terms
  double beta = 1e-5;   // weight of the L1 (connector-role) terms
  std::vector<RegTag> layer_tags;
};

/// Loss value plus gradients with respect to the (masked) factors B and A.
struct RegGrad {
  Matrix grad_b;
  Matrix grad_a;
  double loss = 0.0;
};

/// Below this the Frobenius penalty is treated as zero and its subgradient is 0.
inline constexpr double kFrobeniusKinkFloor = 1e-12;

/// ||M (.) (B A)||_F on the masked factors, without the adapter scale.
double cmr_frobenius(const RetentionMask& mask, const LoraAdapter& adapter);
/// ||M (.) (B A)||_1 on the masked factors, without the adapter scale.
double cmr_l1(const RetentionMask& mask, const LoraAdapter& adapter);

/// With P = M (.) M (.) BA: grad_B = P A^T / L, grad_A = B^T P / L; zero when L <= 1e-12.
RegGrad cmr_frobenius_grad(const RetentionMask& mask, const LoraAdapter& adapter);
/// With G = M (.) sign(BA), sign(0) = 0: grad_B = G A^T, grad_A = B^T G.
RegGrad cmr_l1_grad(const RetentionMask& mask, const LoraAdapter& adapter);

/// task + alpha * sum(frob_terms) + beta * sum(l1_terms), summed in order.
double total_loss(double task_loss, std::span<const double> frob_terms,
                  std::span<const double> l1_terms, const RegularizerConfig& cfg);

}  // namespace sculpt
