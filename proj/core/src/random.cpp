// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/random.hpp"

#include <cmath>
#include <numbers>

#include "sculpt/errors.hpp"

namespace sculpt {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  // Mix the stream id through its own splitmix round before combining so that
  // neighbouring (seed, stream) pairs land far apart.
  std::uint64_t s = stream;
  std::uint64_t x = seed ^ splitmix64(s);
  for (auto& word : state_) word = splitmix64(x);
}

std::uint64_t RandomStream::next_u64() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t bound) noexcept {
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

RandomStream RandomStream::fork(std::uint64_t id) const noexcept {
  std::uint64_t x = stream_ * 0x9e3779b97f4a7c15ULL + id;
  return RandomStream(seed_, splitmix64(x));
}

Matrix sample_gaussian(RandomStream& rng, std::size_t rows, std::size_t cols, double stddev) {
  if (!(stddev >= 0.0)) throw ParameterError("sample_gaussian: stddev must be >= 0");
  Matrix out(rows, cols);
  if (stddev == 0.0) return out;
  for (double& v : out.values()) v = stddev * rng.normal();
  return out;
}

}  // namespace sculpt
