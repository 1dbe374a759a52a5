// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sculpt/adapter.hpp"
#include "sculpt/errors.hpp"
#include "sculpt/random.hpp"

namespace sculpt {
namespace {

LoraAdapter random_adapter(RandomStream& rng, std::size_t p, std::size_t q, std::size_t r) {
  LoraAdapter ad;
  ad.b = sample_gaussian(rng, p, r, 1.0);
  ad.a = sample_gaussian(rng, r, q, 1.0);
  return ad;
}

TEST(BuildMask, TopMagnitudes) {
  const Matrix x{{3, -1}, {0.5, 2}};
  EXPECT_EQ(build_mask(x, 0.5), (Matrix{{1, 0}, {0, 1}}));
  EXPECT_EQ(build_mask(x, 1.0), Matrix::ones(2, 2));
  EXPECT_EQ(build_mask(x, 0.0), Matrix::zeros(2, 2));
}

TEST(BuildMask, TiesGoToLowerIndex) {
  const Matrix x{{1, -1, 1, 1}};
  EXPECT_EQ(build_mask(x, 0.5), (Matrix{{1, 1, 0, 0}}));
  EXPECT_EQ(build_mask(Matrix::zeros(2, 3), 0.5), (Matrix{{1, 1, 1}, {0, 0, 0}}));
}

TEST(BuildMask, RejectsDensityOutsideUnitInterval) {
  EXPECT_THROW(build_mask(Matrix(2, 2), -0.1), ParameterError);
  EXPECT_THROW(build_mask(Matrix(2, 2), 1.5), ParameterError);
}

TEST(BuildMask, CardinalityAndNesting) {
  RandomStream rng(8);
  for (int t = 0; t < 50; ++t) {
    const std::size_t rows = 1 + rng.uniform_index(12), cols = 1 + rng.uniform_index(12);
    Matrix x = sample_gaussian(rng, rows, cols, 1.0);
    // Force some ties.
    for (std::size_t i = 0; i < x.size(); i += 3) x[i] = std::round(x[i]);
    const double s1 = rng.uniform(), s2 = s1 + (1 - s1) * rng.uniform();
    const Matrix m1 = build_mask(x, s1), m2 = build_mask(x, s2);
    const auto n = static_cast<double>(x.size());
    EXPECT_EQ(BinaryPattern::from_matrix(m1).popcount(), static_cast<std::size_t>(std::llround(s1 * n)));
    for (std::size_t i = 0; i < x.size(); ++i) {
      ASSERT_TRUE(m1[i] == 0.0 || m1[i] == 1.0);
      if (m1[i] == 1.0) ASSERT_EQ(m2[i], 1.0) << "retained set must grow with density";
    }
    // Every kept magnitude dominates every dropped magnitude.
    double min_kept = INFINITY, max_dropped = -INFINITY;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (m1[i] != 0.0) {
        min_kept = std::min(min_kept, std::abs(x[i]));
      } else {
        max_dropped = std::max(max_dropped, std::abs(x[i]));
      }
    }
    EXPECT_GE(min_kept, max_dropped);
  }
}

TEST(ApplyMasks, RequiresMasksAndIsIdempotent) {
  RandomStream rng(1);
  LoraAdapter ad = random_adapter(rng, 4, 5, 2);
  EXPECT_THROW(apply_masks(ad), StateError);

  ad.mask_b = Matrix::ones(4, 2);
  ad.mask_a = Matrix::ones(2, 5);
  LoraAdapter same = ad;
  apply_masks(same);
  EXPECT_TRUE(bitwise_equal(same.a, ad.a));
  EXPECT_TRUE(bitwise_equal(same.b, ad.b));

  prune_adapter(ad, 0.3, 0.4);
  LoraAdapter twice = ad;
  apply_masks(twice);
  EXPECT_TRUE(bitwise_equal(twice.a, ad.a));
  EXPECT_TRUE(bitwise_equal(twice.b, ad.b));
}

TEST(ApplyMasks, ZeroedRankRowRemovesItsContribution) {
  RandomStream rng(2);
  LoraAdapter ad = random_adapter(rng, 3, 4, 3);
  ad.mask_b = Matrix::ones(3, 3);
  ad.mask_a = Matrix::ones(3, 4);
  for (std::size_t j = 0; j < 4; ++j) (*ad.mask_a)(1, j) = 0;

  Matrix a_zeroed = ad.a;
  for (std::size_t j = 0; j < 4; ++j) a_zeroed(1, j) = 0;
  const Matrix expected = oracle::naive_matmul(ad.b, a_zeroed);

  apply_masks(ad);
  EXPECT_LT(oracle::max_abs_diff(delta_weight(ad), expected), 1e-14);
}

TEST(DeltaWeight, OuterProductAndScale) {
  LoraAdapter ad;
  ad.b = Matrix{{1}, {0}};
  ad.a = Matrix{{1, 0}};
  EXPECT_EQ(delta_weight(ad), (Matrix{{1, 0}, {0, 0}}));
  ad.scale = 2.0;
  EXPECT_EQ(delta_weight(ad), (Matrix{{2, 0}, {0, 0}}));

  ad.b = Matrix::zeros(2, 1);
  EXPECT_EQ(delta_weight(ad), Matrix::zeros(2, 2));
}

TEST(Merge, RoundTripAndErrors) {
  RandomStream rng(3);
  LoraAdapter ad = random_adapter(rng, 6, 5, 2);
  ad.scale = 0.75;
  const Matrix w0 = sample_gaussian(rng, 6, 5, 1.0);
  const Matrix w0_copy = w0;
  const Matrix merged = merge(w0, ad);
  EXPECT_TRUE(bitwise_equal(w0, w0_copy));
  EXPECT_LT(oracle::max_abs_diff(subtract(merged, w0), delta_weight(ad)), 1e-12);
  EXPECT_TRUE(bitwise_equal(merge(Matrix::zeros(6, 5), ad), delta_weight(ad)));

  ad.b = Matrix::zeros(6, 2);
  EXPECT_TRUE(bitwise_equal(merge(w0, ad), w0));
  EXPECT_THROW(merge(Matrix(5, 6), ad), DimensionError);
}

TEST(StructuralSparsity, HandCases) {
  LoraAdapter ad;
  ad.b = Matrix{{1}, {1}};
  ad.a = Matrix{{1, 1}};
  EXPECT_THROW(structural_sparsity(ad), StateError);
  ad.mask_b = Matrix{{1}, {0}};
  ad.mask_a = Matrix{{1, 0}};
  EXPECT_DOUBLE_EQ(structural_sparsity(ad), 0.25);
  ad.mask_b = Matrix::ones(2, 1);
  ad.mask_a = Matrix::ones(1, 2);
  EXPECT_DOUBLE_EQ(structural_sparsity(ad), 1.0);
  ad.mask_a = Matrix::zeros(1, 2);
  EXPECT_DOUBLE_EQ(structural_sparsity(ad), 0.0);
}

TEST(StructuralSparsity, MatchesOracleAndBoundsNumericFill) {
  RandomStream rng(4);
  for (int t = 0; t < 30; ++t) {
    const std::size_t p = 2 + rng.uniform_index(15), q = 2 + rng.uniform_index(15);
    const std::size_t r = 1 + rng.uniform_index(std::min(p, q));
    LoraAdapter ad = random_adapter(rng, p, q, r);
    prune_adapter(ad, rng.uniform(), rng.uniform());
    const double s = structural_sparsity(ad);
    EXPECT_DOUBLE_EQ(s, oracle::reachable_fraction(*ad.mask_b, *ad.mask_a));
    EXPECT_GE(s, nonzero_fraction(delta_weight(ad)));
  }
}

TEST(PruneAdapter, DensityMatchesRetainedFraction) {
  RandomStream rng(6);
  LoraAdapter ad = random_adapter(rng, 20, 30, 5);
  prune_adapter(ad, 0.1, 0.2);
  EXPECT_DOUBLE_EQ(nonzero_fraction(ad.b), 0.1);
  EXPECT_DOUBLE_EQ(nonzero_fraction(ad.a), 0.2);
  EXPECT_EQ(ad.density_b, 0.1);
  EXPECT_EQ(ad.density_a, 0.2);
}

TEST(InitAdapter, ZeroDeltaDeterministicAndScaled) {
  RandomStream rng1(10, 2), rng2(10, 2);
  const LoraAdapter a1 = init_adapter(rng1, 300, 400, 250);
  const LoraAdapter a2 = init_adapter(rng2, 300, 400, 250);
  EXPECT_TRUE(bitwise_equal(a1.a, a2.a));
  EXPECT_EQ(delta_weight(a1), Matrix::zeros(300, 400));
  EXPECT_FALSE(a1.has_masks());

  double sq = 0;
  for (double v : a1.a.values()) sq += v * v;
  const double std_hat = std::sqrt(sq / static_cast<double>(a1.a.size()));
  EXPECT_NEAR(std_hat, 0.02, 0.002);

  RandomStream rng(0);
  EXPECT_THROW(init_adapter(rng, 4, 3, 4), ParameterError);
  EXPECT_THROW(init_adapter(rng, 4, 3, 0), ParameterError);
}

}  // namespace
}  // namespace sculpt
