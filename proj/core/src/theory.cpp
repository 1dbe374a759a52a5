// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/theory.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <string>
#include <thread>

#include "sculpt/errors.hpp"

namespace sculpt {

namespace {

void fill_bernoulli(RandomStream& rng, std::span<std::uint8_t> bits, double p) {
  for (auto& b : bits) b = rng.bernoulli(p) ? 1 : 0;
}

// Partial Fisher-Yates: exactly round(s * n) set bits, every subset equally likely.
void fill_exact(RandomStream& rng, std::span<std::uint8_t> bits, double s) {
  const std::size_t n = bits.size();
  const auto k = static_cast<std::size_t>(std::llround(s * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
    bits[idx[i]] = 1;
  }
}

// n densities in [avg - w, avg + w] with mean exactly avg: antithetic pairs
// avg +/- w*u with u ~ U[-1, 1]; an odd leftover gets avg itself.
std::vector<double> antithetic_densities(RandomStream& rng, std::size_t n, double avg, double half_width) {
  std::vector<double> out(n, avg);
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const double u = 2.0 * rng.uniform() - 1.0;
    out[i] = avg + half_width * u;
    out[i + 1] = avg - half_width * u;
  }
  // Shuffle so the pairing is not visible in row order.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

double resolve_half_width(double requested, double avg) {
  const double widest = std::min(avg, 1.0 - avg);
  return requested < 0.0 ? widest : std::min(requested, widest);
}

// Packs pattern lines into 64-bit words; `by_row` packs row-wise, otherwise column-wise.
std::vector<std::uint64_t> pack(const BinaryPattern& pat, bool by_row, std::size_t words) {
  const std::size_t lines = by_row ? pat.rows : pat.cols;
  const std::size_t len = by_row ? pat.cols : pat.rows;
  std::vector<std::uint64_t> out(lines * words, 0);
  for (std::size_t l = 0; l < lines; ++l) {
    for (std::size_t k = 0; k < len; ++k) {
      const bool set = by_row ? pat.at(l, k) : pat.at(k, l);
      if (set) out[l * words + k / 64] |= std::uint64_t{1} << (k % 64);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(SamplingMode mode) noexcept {
  switch (mode) {
    case SamplingMode::exact_topk: return "topk";
    case SamplingMode::heterogeneous: return "hetero";
    case SamplingMode::bernoulli: break;
  }
  return "bernoulli";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "bernoulli") return SamplingMode::bernoulli;
  if (text == "topk" || text == "exact_topk") return SamplingMode::exact_topk;
  if (text == "hetero" || text == "heterogeneous") return SamplingMode::heterogeneous;
  throw ParameterError("unknown sampling mode '" + std::string(text) + "'");
}

void SparsitySpec::validate() const {
  if (p == 0 || q == 0 || r == 0) throw ParameterError("SparsitySpec: p, q and r must be positive");
  if (!(s_a >= 0.0 && s_a <= 1.0) || !(s_b >= 0.0 && s_b <= 1.0)) {
    throw ParameterError("SparsitySpec: densities must lie in [0, 1]");
  }
}

double expected_product_sparsity(double s_b, double s_a, std::size_t r) {
  return 1.0 - std::pow(1.0 - s_b * s_a, static_cast<double>(r));
}

double expected_product_sparsity(const SparsitySpec& spec) {
  return expected_product_sparsity(spec.s_b, spec.s_a, spec.r);
}

double concentration_bound(const SparsitySpec& spec, double delta) {
  if (!(delta >= 0.0)) throw ParameterError("concentration_bound: delta must be >= 0");
  const double p = static_cast<double>(spec.p);
  const double q = static_cast<double>(spec.q);
  const double r = static_cast<double>(spec.r);
  return 2.0 * std::exp(-2.0 * delta * delta * p * q / (r * (p + q)));
}

std::pair<BinaryPattern, BinaryPattern> sample_mask_pair(RandomStream& rng, const SparsitySpec& spec) {
  spec.validate();
  BinaryPattern mb(spec.p, spec.r);
  BinaryPattern ma(spec.r, spec.q);
  switch (spec.sampling) {
    case SamplingMode::bernoulli:
      fill_bernoulli(rng, mb.bits, spec.s_b);
      fill_bernoulli(rng, ma.bits, spec.s_a);
      break;
    case SamplingMode::exact_topk:
      fill_exact(rng, mb.bits, spec.s_b);
      fill_exact(rng, ma.bits, spec.s_a);
      break;
    case SamplingMode::heterogeneous: {
      const auto row_density = antithetic_densities(rng, spec.p, spec.s_b,
                                                    resolve_half_width(spec.hetero_half_width, spec.s_b));
      const auto col_density = antithetic_densities(rng, spec.q, spec.s_a,
                                                    resolve_half_width(spec.hetero_half_width, spec.s_a));
      for (std::size_t i = 0; i < spec.p; ++i)
        for (std::size_t k = 0; k < spec.r; ++k) mb.bits[i * spec.r + k] = rng.bernoulli(row_density[i]);
      for (std::size_t k = 0; k < spec.r; ++k)
        for (std::size_t j = 0; j < spec.q; ++j) ma.bits[k * spec.q + j] = rng.bernoulli(col_density[j]);
      break;
    }
  }
  return {std::move(mb), std::move(ma)};
}

double product_pattern_sparsity(const BinaryPattern& mb, const BinaryPattern& ma) {
  if (mb.cols != ma.rows) {
    throw DimensionError("product_pattern_sparsity: inner dimensions differ (" +
                         std::to_string(mb.rows) + "x" + std::to_string(mb.cols) + " * " +
                         std::to_string(ma.rows) + "x" + std::to_string(ma.cols) + ")");
  }
  if (mb.rows == 0 || ma.cols == 0) return 0.0;
  const std::size_t words = (mb.cols + 63) / 64;
  const auto rows = pack(mb, true, words);
  const auto cols = pack(ma, false, words);
  std::size_t reachable = 0;
  for (std::size_t i = 0; i < mb.rows; ++i) {
    const std::uint64_t* ri = rows.data() + i * words;
    for (std::size_t j = 0; j < ma.cols; ++j) {
      const std::uint64_t* cj = cols.data() + j * words;
      std::uint64_t hit = 0;
      for (std::size_t w = 0; w < words && hit == 0; ++w) hit = ri[w] & cj[w];
      reachable += hit != 0;
    }
  }
  return static_cast<double>(reachable) / (static_cast<double>(mb.rows) * static_cast<double>(ma.cols));
}

TheoryReport monte_carlo_validate(std::uint64_t seed, const SparsitySpec& spec, std::size_t trials,
                                  double delta, std::size_t jobs) {
  spec.validate();
  if (trials == 0) throw ParameterError("monte_carlo_validate: trials must be >= 1");

  TheoryReport report;
  report.expected_sparsity = expected_product_sparsity(spec);
  report.delta = delta;
  report.bound = concentration_bound(spec, delta);
  report.per_trial.assign(trials, 0.0);

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, trials);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      RandomStream rng(seed, t);
      auto [mb, ma] = sample_mask_pair(rng, spec);
      report.per_trial[t] = product_pattern_sparsity(mb, ma);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }

  double sum = 0.0;
  for (double v : report.per_trial) sum += v;
  report.empirical_mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double v : report.per_trial) {
    const double d = v - report.empirical_mean;
    ss += d * d;
    if (std::abs(v - report.expected_sparsity) >= delta) ++report.violations;
  }
  report.empirical_std = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
  return report;
}

}  // namespace sculpt
