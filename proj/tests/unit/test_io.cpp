// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "sculpt/adapter_io.hpp"
#include "sculpt/errors.hpp"
#include "sculpt/random.hpp"
#include "sculpt/reports.hpp"

namespace sculpt {
namespace {

TEST(FormatDouble, RoundTripsBitForBit) {
  RandomStream rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.uniform_index(80)) - 40);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(parse_double("1e-05"), 1e-05);
  EXPECT_THROW(parse_double("1.0x"), ParameterError);
  EXPECT_THROW(parse_double(""), ParameterError);
}

TEST(Csv, SplitKeepsEmptyCells) {
  const auto cells = split_csv_line("a,,b,");
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[1], "");
  EXPECT_EQ(cells[3], "");
}

TEST(TraceCsv, HeaderAndRows) {
  TrainingTrace t{{1, 0.5, 0.25, 0.0, 0.50025}, {2, 0.4, 0.2, 1.5, 0.4}};
  std::ostringstream os;
  write_trace_csv(os, t);
  EXPECT_EQ(os.str(), "step,task_loss,cmr_frob,cmr_l1,total_loss\n1,0.5,0.25,0,0.50025\n2,0.4,0.2,1.5,0.4\n");
}

TEST(EvalCsv, LayerRowsRoundTrip) {
  EvalReport r;
  r.source_mse = {0.1, 0.3};
  r.source_scores = {1 / 1.1, 1 / 1.3};
  r.target_mse = 0.2;
  r.target_score = 1 / 1.2;
  r.source = (r.source_scores[0] + r.source_scores[1]) / 2;
  r.target = r.target_score;
  r.avg = (r.source + r.target) / 2;
  r.layers = {{0, 32, 16, 0.125, 0.0772}, {1, 64, 64, 1.0, 1.0}};
  std::ostringstream os;
  write_eval_csv(os, r);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "kind,id,mse,score,rows,cols,structural_sparsity,expected_sparsity");
  EXPECT_NE(text.find("aggregate,Avg,"), std::string::npos);
  std::istringstream in(text);
  const auto rows = read_layer_rows(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rows, 32u);
  EXPECT_EQ(rows[0].structural, 0.125);
  EXPECT_EQ(rows[1].expected, 1.0);
}

TEST(TheoryCsv, Layout) {
  TheoryReport r;
  r.expected_sparsity = 0.5;
  r.per_trial = {0.5, 0.75};
  r.empirical_mean = 0.625;
  r.delta = 0.1;
  r.bound = 2.0;
  r.violations = 1;
  std::ostringstream os;
  write_theory_csv(os, r);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "expected,delta,bound,empirical_mean,empirical_std,violations,trials");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 12), "0.5,0.1,2,0.");
  std::getline(in, line);
  EXPECT_EQ(line, "trial_id,sparsity");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0.5");
}

LoraAdapter sample_adapter(RandomStream& rng, bool masks) {
  LoraAdapter ad = init_adapter(rng, 6, 5, 3, 0.5);
  ad.b = sample_gaussian(rng, 6, 3, 1.0);
  if (masks) prune_adapter(ad, 0.3, 0.4);
  return ad;
}

void expect_same(const LoraAdapter& x, const LoraAdapter& y) {
  EXPECT_TRUE(bitwise_equal(x.b, y.b));
  EXPECT_TRUE(bitwise_equal(x.a, y.a));
  EXPECT_EQ(x.scale, y.scale);
  EXPECT_EQ(x.has_masks(), y.has_masks());
  if (x.has_masks() && y.has_masks()) {
    EXPECT_EQ(*x.mask_a, *y.mask_a);
    EXPECT_EQ(*x.mask_b, *y.mask_b);
    EXPECT_EQ(x.density_a, y.density_a);
    EXPECT_EQ(x.density_b, y.density_b);
  }
}

TEST(AdapterIo, RoundTrip) {
  RandomStream rng(3);
  for (bool masks : {false, true}) {
    const LoraAdapter ad = sample_adapter(rng, masks);
    const Matrix override_delta = sample_gaussian(rng, 6, 5, 1.0);
    std::stringstream ss;
    write_adapter(ss, ad, &override_delta);
    std::optional<Matrix> got_delta;
    const LoraAdapter back = read_adapter(ss, &got_delta);
    expect_same(ad, back);
    ASSERT_TRUE(got_delta.has_value());
    EXPECT_TRUE(bitwise_equal(*got_delta, override_delta));
  }
}

TEST(ModelIo, RoundTripAndAdapterReload) {
  RandomStream rng(4);
  ToyModel m = make_model(rng, Architecture{});
  for (auto& l : m.layers) {
    l.adapter.b = sample_gaussian(rng, l.adapter.b.rows(), l.adapter.b.cols(), 1.0);
    prune_adapter(l.adapter, 0.2, 0.2);
  }
  m.layers[1].delta_override = sample_gaussian(rng, 32, 32, 1.0);

  std::stringstream ss;
  write_model(ss, m);
  const ToyModel back = read_model(ss);
  ASSERT_EQ(back.layers.size(), m.layers.size());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    EXPECT_TRUE(bitwise_equal(back.layers[l].w0, m.layers[l].w0));
    EXPECT_EQ(back.layers[l].role, m.layers[l].role);
    EXPECT_EQ(back.layers[l].activation, m.layers[l].activation);
    expect_same(back.layers[l].adapter, m.layers[l].adapter);
    EXPECT_EQ(back.layers[l].delta_override.has_value(), m.layers[l].delta_override.has_value());
  }

  std::stringstream as;
  write_adapters(as, m);
  ToyModel fresh = make_model(rng, Architecture{});
  read_adapters(as, fresh);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    expect_same(fresh.layers[l].adapter, m.layers[l].adapter);
    EXPECT_TRUE(bitwise_equal(fresh.layers[l].delta(), m.layers[l].delta()));
  }
}

TEST(ModelIo, RejectsMalformedInput) {
  std::istringstream bad_magic("sculpt-model 9\n");
  EXPECT_THROW(read_model(bad_magic), ConfigError);
  std::istringstream truncated("sculpt-adapters 1\nlayers 1\nadapter 2 2 1 1 1 1 0 0\n0.5\n");
  ToyModel m;
  EXPECT_THROW(read_adapters(truncated, m), ConfigError);
}

}  // namespace
}  // namespace sculpt
