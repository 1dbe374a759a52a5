// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sculpt/adapter_io.hpp"
#include "sculpt/errors.hpp"
#include "sculpt/reports.hpp"

namespace sculpt::cli {

namespace fs = std::filesystem;

namespace {

// Layers at least this wide in both dimensions are in the concentration-bound regime.
constexpr std::size_t kBoundRegimeMinDim = 64;
constexpr double kLayerSparsityTolerance = 0.1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw UsageError("failed while writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::size_t resolve_jobs(std::size_t jobs) {
  return jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
}

// Runs fn(i) for i in [0, n) on a bounded pool. Results must be written by index.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::min(resolve_jobs(jobs), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- theory

struct TheoryArgs {
  std::size_t p = 256, q = 256, r = 16;
  double s_a = 0.1, s_b = 0.1;
  std::size_t trials = 200;
  double delta = 0.1;
  std::string mode = "bernoulli";
  double half_width = -1.0;
  std::uint64_t seed = 42;
  double tolerance = 0.01;
  std::size_t jobs = 0;
  std::string out;
};

int cmd_theory(const TheoryArgs& a, std::ostream& out) {
  if (!(a.delta >= 0.0)) throw UsageError("--delta must be >= 0");
  if (a.trials == 0) throw UsageError("--trials must be >= 1");
  SparsitySpec spec;
  spec.p = a.p;
  spec.q = a.q;
  spec.r = a.r;
  spec.s_a = a.s_a;
  spec.s_b = a.s_b;
  spec.hetero_half_width = a.half_width;
  try {
    spec.sampling = parse_sampling_mode(a.mode);
    spec.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }

  const TheoryReport report = monte_carlo_validate(a.seed, spec, a.trials, a.delta, a.jobs);
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_file(fs::path(a.out) / "theory.csv", [&](std::ostream& os) { write_theory_csv(os, report); });
  }

  // Heterogeneous placement only promises an upper bound on the mean.
  const bool mean_ok = spec.sampling == SamplingMode::heterogeneous
                           ? report.empirical_mean <= report.expected_sparsity + a.tolerance
                           : std::abs(report.empirical_mean - report.expected_sparsity) <= a.tolerance;
  const double allowed_rate = std::min(1.0, report.bound);
  const bool bound_ok =
      static_cast<double>(report.violations) <= allowed_rate * static_cast<double>(a.trials);

  out << "mode=" << to_string(spec.sampling) << " expected=" << fixed(report.expected_sparsity)
      << " mean=" << fixed(report.empirical_mean) << " std=" << fixed(report.empirical_std)
      << " delta=" << format_double(a.delta) << " bound=" << fixed(report.bound)
      << " violations=" << report.violations << "/" << a.trials << " -> "
      << (mean_ok && bound_ok ? "PASS" : "FAIL") << '\n';
  return mean_ok && bound_ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string out;
  std::string base;
};

ToyModel load_base(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open base model '" + path + "'");
  return read_model(in);
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = load_run_config(a.config);
  apply_seed_override(cfg);
  cfg.train.validate();

  std::optional<ToyModel> base;
  if (!a.base.empty()) base = load_base(a.base);

  const TrainingRun run = run_training(cfg, base ? &*base : nullptr);

  const fs::path dir(a.out);
  ensure_dir(dir);
  write_file(dir / "config.cfg", [&](std::ostream& os) { write_run_config(os, cfg); });
  if (!base) write_file(dir / "base.model", [&](std::ostream& os) { write_model(os, run.base); });
  write_file(dir / "base_eval.csv", [&](std::ostream& os) { write_eval_csv(os, run.base_eval); });
  write_file(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, run.result.trace); });
  write_file(dir / "eval.csv", [&](std::ostream& os) { write_eval_csv(os, run.eval); });
  write_file(dir / "adapters.txt", [&](std::ostream& os) { write_adapters(os, run.result.model); });

  out << summary_line(run.eval) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config;
  std::string out;
  std::string param;
  std::string values;
  std::size_t seeds = 3;
  std::size_t jobs = 0;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  RunConfig cfg = load_run_config(a.config);
  apply_seed_override(cfg);
  cfg.train.validate();

  SweepAxis axis = cfg.sweep.value_or(SweepAxis{});
  if (!a.param.empty()) axis.param = a.param;
  if (!a.values.empty()) {
    axis.values.clear();
    try {
      for (const auto& cell : split_csv_line(a.values)) axis.values.push_back(parse_double(cell));
    } catch (const ParameterError& e) {
      throw UsageError(std::string("--values: ") + e.what());
    }
  }
  if (!is_sweep_param(axis.param)) {
    throw UsageError("--param must be one of s|alpha|omega|beta, got '" + axis.param + "'");
  }
  if (axis.values.empty()) throw UsageError("--values is empty");
  if (a.seeds == 0) throw UsageError("--seeds must be >= 1");
  cfg.sweep = axis;
  for (double v : axis.values) {
    RunConfig probe = cfg;
    apply_sweep_value(probe, axis.param, v);
    probe.train.validate();
  }

  // One pretrained base per seed, shared by every grid value.
  std::vector<RunConfig> seed_cfgs(a.seeds, cfg);
  for (std::size_t i = 0; i < a.seeds; ++i) seed_cfgs[i].train.seed = cfg.train.seed + i;
  std::vector<ToyModel> bases(a.seeds);
  std::vector<EvalReport> base_evals(a.seeds);
  parallel_for(a.seeds, a.jobs, [&](std::size_t i) {
    const RunConfig& c = seed_cfgs[i];
    const TaskSpec task = make_tasks(c.resolved_task());
    bases[i] = pretrain_base(c.train.seed, task, c.arch, c.pretrain);
    base_evals[i] = evaluate(bases[i], task);
  });

  struct Point {
    double value;
    std::size_t seed_index;
    EvalReport eval;
  };
  std::vector<Point> points;
  for (double v : axis.values)
    for (std::size_t i = 0; i < a.seeds; ++i) points.push_back({v, i, {}});
  parallel_for(points.size(), a.jobs, [&](std::size_t k) {
    RunConfig c = seed_cfgs[points[k].seed_index];
    apply_sweep_value(c, axis.param, points[k].value);
    points[k].eval = run_training(c, &bases[points[k].seed_index]).eval;
  });
  std::stable_sort(points.begin(), points.end(), [](const Point& l, const Point& r) {
    return l.value < r.value || (l.value == r.value && l.seed_index < r.seed_index);
  });

  ensure_dir(a.out);
  write_file(fs::path(a.out) / "config.cfg", [&](std::ostream& os) { write_run_config(os, cfg); });
  write_file(fs::path(a.out) / "sweep.csv", [&](std::ostream& os) {
    os << "param_value,seed,source,target,avg\n";
    for (const auto& p : points) {
      os << format_double(p.value) << ',' << seed_cfgs[p.seed_index].train.seed << ','
         << format_double(p.eval.source) << ',' << format_double(p.eval.target) << ','
         << format_double(p.eval.avg) << '\n';
    }
  });

  std::map<double, std::vector<double>> src, tgt;
  for (const auto& p : points) {
    src[p.value].push_back(p.eval.source);
    tgt[p.value].push_back(p.eval.target);
  }
  out << axis.param << " sweep over " << a.seeds << " seed(s)\n";
  for (const auto& [v, s] : src) {
    out << "  " << axis.param << '=' << format_double(v) << "  median Source=" << fixed(median(s))
        << " Target=" << fixed(median(tgt[v])) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& in_dir, std::ostream& out) {
  const fs::path dir(in_dir);
  const fs::path eval_path = dir / "eval.csv";
  if (!fs::is_regular_file(eval_path)) throw UsageError("no eval.csv in '" + in_dir + "'");
  std::ifstream in(eval_path);
  std::vector<LayerSparsity> layers;
  try {
    layers = read_layer_rows(in);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  if (layers.empty()) throw UsageError("eval.csv in '" + in_dir + "' has no layer rows");

  std::size_t in_regime = 0, violations = 0;
  std::ostringstream table;
  table << "layer  shape      actual    expected  regime  within\n";
  write_file(dir / "report_layers.csv", [&](std::ostream& os) {
    os << "layer_idx,rows,cols,structural_sparsity,expected_sparsity,bound_regime,within_tolerance\n";
    for (const auto& ls : layers) {
      const bool regime = ls.rows >= kBoundRegimeMinDim && ls.cols >= kBoundRegimeMinDim;
      const bool within = ls.structural <= std::min(1.0, ls.expected + kLayerSparsityTolerance);
      in_regime += regime;
      violations += regime && !within;
      os << ls.layer << ',' << ls.rows << ',' << ls.cols << ',' << format_double(ls.structural) << ','
         << format_double(ls.expected) << ',' << (regime ? 1 : 0) << ',' << (within ? 1 : 0) << '\n';
      char line[128];
      std::snprintf(line, sizeof(line), "%-6zu %4zux%-5zu %-9.4f %-9.4f %-7s %s\n", ls.layer, ls.rows, ls.cols,
                    ls.structural, ls.expected, regime ? "yes" : "no", within ? "yes" : "no");
      table << line;
    }
  });

  std::ostringstream summary;
  summary << "Per-layer structural sparsity of the applied delta\n\n" << table.str() << '\n';
  summary << "Layers in the bound regime (rows, cols >= " << kBoundRegimeMinDim << "): " << in_regime << '\n';
  summary << "Regime layers above expected + " << format_double(kLayerSparsityTolerance) << ": " << violations
          << '\n';

  std::ifstream eval_in(eval_path);
  std::string line;
  std::map<std::string, double> agg;
  while (std::getline(eval_in, line)) {
    const auto cells = split_csv_line(line);
    if (cells.size() == 8 && cells[0] == "aggregate") agg[cells[1]] = parse_double(cells[3]);
  }
  if (agg.count("Source")) {
    summary << "\nSource=" << fixed(agg["Source"]) << " Target=" << fixed(agg["Target"])
            << " Avg=" << fixed(agg["Avg"]) << '\n';
  }
  const fs::path base_eval = dir / "base_eval.csv";
  if (fs::is_regular_file(base_eval)) {
    std::ifstream bin(base_eval);
    while (std::getline(bin, line)) {
      const auto cells = split_csv_line(line);
      if (cells.size() == 8 && cells[0] == "aggregate" && cells[1] == "Source" && agg.count("Source")) {
        const double before = parse_double(cells[3]);
        summary << "Source before fine-tuning=" << fixed(before) << " drop=" << fixed(before - agg["Source"])
                << '\n';
      }
    }
  }
  write_file(dir / "report.txt", [&](std::ostream& os) { os << summary.str(); });
  out << summary.str();
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

void apply_seed_override(RunConfig& cfg) {
  if (const char* env = std::getenv("SCULPT_SEED"); env && *env) {
    std::uint64_t seed = 0;
    const std::string text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw ConfigError("SCULPT_SEED is not an unsigned integer: '" + text + "'");
    }
    cfg.train.seed = seed;
  }
}

std::string summary_line(const EvalReport& report) {
  return "Source=" + fixed(report.source) + " Target=" + fixed(report.target) + " Avg=" + fixed(report.avg);
}

TrainingRun run_training(const RunConfig& cfg, const ToyModel* base) {
  const TaskSpec task = make_tasks(cfg.resolved_task());
  TrainingRun run;
  run.base = base ? *base : pretrain_base(cfg.train.seed, task, cfg.arch, cfg.pretrain);
  if (run.base.input_dim() != task.input_dim() || run.base.output_dim() != task.output_dim()) {
    throw ConfigError("base model dimensions do not match the configured task");
  }
  run.base_eval = evaluate(run.base, task);
  run.result = train(run.base, task, cfg.train);
  run.eval = evaluate(run.result.model, task);
  return run;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sculpt: sparse, regularised low-rank adaptation toolkit"};
  app.require_subcommand(1);

  TheoryArgs theory;
  auto* th = app.add_subcommand("theory", "Monte Carlo check of the product-sparsity theorems");
  th->add_option("--p", theory.p, "rows of B")->check(CLI::PositiveNumber);
  th->add_option("--q", theory.q, "columns of A")->check(CLI::PositiveNumber);
  th->add_option("--r", theory.r, "rank")->check(CLI::PositiveNumber);
  th->add_option("--s-a", theory.s_a, "retained density of A")->check(CLI::Range(0.0, 1.0));
  th->add_option("--s-b", theory.s_b, "retained density of B")->check(CLI::Range(0.0, 1.0));
  th->add_option("--trials", theory.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  th->add_option("--delta", theory.delta, "deviation threshold for the concentration bound");
  th->add_option("--mode", theory.mode, "bernoulli|topk|hetero")
      ->check(CLI::IsMember({"bernoulli", "topk", "hetero"}));
  th->add_option("--half-width", theory.half_width, "hetero density band half-width (default: widest)");
  th->add_option("--seed", theory.seed, "base seed; trial t uses stream t");
  th->add_option("--tolerance", theory.tolerance, "acceptance window on the empirical mean");
  th->add_option("--jobs", theory.jobs, "worker threads (0 = all cores)");
  th->add_option("--out", theory.out, "output directory for theory.csv");

  TrainArgs train_args;
  auto* tr = app.add_subcommand("train", "Pretrain (or load) a base, fine-tune, evaluate");
  tr->add_option("--config", train_args.config, "key = value config file")->required();
  tr->add_option("--out", train_args.out, "output directory")->required();
  tr->add_option("--base", train_args.base, "pretrained base model file to reuse");

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Grid over one hyperparameter and several seeds");
  sw->add_option("--config", sweep.config, "base config file")->required();
  sw->add_option("--out", sweep.out, "output directory")->required();
  sw->add_option("--param", sweep.param, "s|alpha|omega|beta");
  sw->add_option("--values", sweep.values, "comma-separated values");
  sw->add_option("--seeds", sweep.seeds, "number of seeds (config seed, +1, ...)");
  sw->add_option("--jobs", sweep.jobs, "worker threads (0 = all cores)");

  std::string report_dir;
  auto* rp = app.add_subcommand("report", "Per-layer sparsity table for a finished run");
  rp->add_option("--in", report_dir, "run directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (th->parsed()) return cmd_theory(theory, out);
    if (tr->parsed()) return cmd_train(train_args, out);
    if (sw->parsed()) return cmd_sweep(sweep, out);
    if (rp->parsed()) return cmd_report(report_dir, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sculpt::cli
