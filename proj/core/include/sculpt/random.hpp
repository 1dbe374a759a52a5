// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "sculpt/matrix.hpp"

namespace sculpt {

/// xoshiro256** seeded through splitmix64 from a (seed, stream id) pair.
///
/// The sequence is defined purely by integer arithmetic, so a given
/// (seed, stream) reproduces bit-for-bit on every platform. Gaussian draws use
/// Box-Muller on top of uniform(); they depend only on libm log/sqrt/cos/sin.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  double normal() noexcept;

  /// Independent child stream derived from this stream's (seed, stream) and `id`.
  RandomStream fork(std::uint64_t id) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// i.i.d. N(0, stddev^2) entries, row-major draw order.
Matrix sample_gaussian(RandomStream& rng, std::size_t rows, std::size_t cols, double stddev);

}  // namespace sculpt
