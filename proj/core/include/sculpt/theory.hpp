// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "sculpt/adapter.hpp"
#include "sculpt/random.hpp"

namespace sculpt {

/// How nonzero positions of the factor masks are placed.
enum class SamplingMode {
  bernoulli,      // each bit set independently with probability s
  exact_topk,     // exactly round(s * n) bits, uniformly placed
  heterogeneous,  // per-row (B) / per-column (A) densities around the stated average
};

std::string_view to_string(SamplingMode mode) noexcept;
/// Accepts bernoulli|topk|exact_topk|hetero|heterogeneous.
SamplingMode parse_sampling_mode(std::string_view text);

struct SparsitySpec {
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t r = 0;
  double s_a = 0.1;
  double s_b = 0.1;
  SamplingMode sampling = SamplingMode::bernoulli;
  /// Half-width of the uniform band the heterogeneous per-row/column densities
  /// are drawn from. Negative means min(s, 1 - s), the widest band that stays in [0, 1].
  double hetero_half_width = -1.0;

  /// Throws ParameterError on zero dimensions or densities outside [0, 1].
  void validate() const;

  friend bool operator==(const SparsitySpec&, const SparsitySpec&) = default;
};

struct TheoryReport {
  double expected_sparsity = 0.0;
  double empirical_mean = 0.0;
  double empirical_std = 0.0;
  std::vector<double> per_trial;
  double delta = 0.0;
  double bound = 0.0;
  std::size_t violations = 0;
};

/// 1 - (1 - s_B s_A)^r.
double expected_product_sparsity(const SparsitySpec& spec);
double expected_product_sparsity(double s_b, double s_a, std::size_t r);

/// 2 exp(-2 delta^2 p q / (r (p + q))), unclamped. Throws ParameterError for delta < 0.
double concentration_bound(const SparsitySpec& spec, double delta);

/// Draws (mask_B: p x r, mask_A: r x q) according to `spec.sampling`.
std::pair<BinaryPattern, BinaryPattern> sample_mask_pair(RandomStream& rng, const SparsitySpec& spec);

/// Fraction of (i, j) with some k such that mb(i, k) and ma(k, j) are set.
double product_pattern_sparsity(const BinaryPattern& mb, const BinaryPattern& ma);

/// Runs `trials` independent (sample, measure) rounds. Trial t uses
/// RandomStream(seed, t), so the report does not depend on scheduling.
/// `jobs` = 0 picks the hardware concurrency.
TheoryReport monte_carlo_validate(std::uint64_t seed, const SparsitySpec& spec, std::size_t trials,
                                  double delta, std::size_t jobs = 0);

}  // namespace sculpt
