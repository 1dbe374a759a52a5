// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/reports.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "sculpt/errors.hpp"

namespace sculpt {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParameterError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  out << "step,task_loss,cmr_frob,cmr_l1,total_loss\n";
  for (const auto& row : trace) {
    out << row.step << ',' << format_double(row.task_loss) << ',' << format_double(row.cmr_frob) << ','
        << format_double(row.cmr_l1) << ',' << format_double(row.total_loss) << '\n';
  }
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << "kind,id,mse,score,rows,cols,structural_sparsity,expected_sparsity\n";
  for (std::size_t i = 0; i < report.source_scores.size(); ++i) {
    out << "task,source_" << i << ',' << format_double(report.source_mse[i]) << ','
        << format_double(report.source_scores[i]) << ",,,,\n";
  }
  out << "task,target," << format_double(report.target_mse) << ',' << format_double(report.target_score)
      << ",,,,\n";
  out << "aggregate,Source,," << format_double(report.source) << ",,,,\n";
  out << "aggregate,Target,," << format_double(report.target) << ",,,,\n";
  out << "aggregate,Avg,," << format_double(report.avg) << ",,,,\n";
  for (const auto& ls : report.layers) {
    out << "layer," << ls.layer << ",,," << ls.rows << ',' << ls.cols << ',' << format_double(ls.structural)
        << ',' << format_double(ls.expected) << '\n';
  }
}

std::vector<LayerSparsity> read_layer_rows(std::istream& in) {
  std::vector<LayerSparsity> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      if (line.rfind("kind,id,", 0) != 0) throw ParameterError("eval CSV: unexpected header '" + line + "'");
      header = false;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw ParameterError("eval CSV: malformed row '" + line + "'");
    if (cells[0] != "layer") continue;
    LayerSparsity ls;
    ls.layer = static_cast<std::size_t>(parse_double(cells[1]));
    ls.rows = static_cast<std::size_t>(parse_double(cells[4]));
    ls.cols = static_cast<std::size_t>(parse_double(cells[5]));
    ls.structural = parse_double(cells[6]);
    ls.expected = parse_double(cells[7]);
    rows.push_back(ls);
  }
  if (header) throw ParameterError("eval CSV: empty file");
  return rows;
}

void write_theory_csv(std::ostream& out, const TheoryReport& report) {
  out << "expected,delta,bound,empirical_mean,empirical_std,violations,trials\n";
  out << format_double(report.expected_sparsity) << ',' << format_double(report.delta) << ','
      << format_double(report.bound) << ',' << format_double(report.empirical_mean) << ','
      << format_double(report.empirical_std) << ',' << report.violations << ',' << report.per_trial.size()
      << '\n';
  out << "trial_id,sparsity\n";
  for (std::size_t t = 0; t < report.per_trial.size(); ++t) {
    out << t << ',' << format_double(report.per_trial[t]) << '\n';
  }
}

}  // namespace sculpt
