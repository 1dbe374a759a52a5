// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sculpt/evaluate.hpp"
#include "sculpt/theory.hpp"
#include "sculpt/trainer.hpp"

namespace sculpt {

/// Shortest decimal that round-trips, '.' separator regardless of locale.
std::string format_double(double value);
/// Inverse of format_double. Throws ParameterError on trailing garbage.
double parse_double(std::string_view text);

/// step,task_loss,cmr_frob,cmr_l1,total_loss
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);

/// kind,id,mse,score,rows,cols,structural_sparsity,expected_sparsity
/// kind is task (id source_<i> | target), aggregate (id Source | Target | Avg)
/// or layer (id = layer index). Cells that do not apply are left empty.
void write_eval_csv(std::ostream& out, const EvalReport& report);

/// Layer rows recovered from an eval CSV.
std::vector<LayerSparsity> read_layer_rows(std::istream& in);

/// Two header rows (summary names, summary values) followed by trial_id,sparsity rows.
void write_theory_csv(std::ostream& out, const TheoryReport& report);

/// Splits one CSV line on commas (no quoting; none of our files need it).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace sculpt
