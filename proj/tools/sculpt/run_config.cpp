// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "sculpt/errors.hpp"
#include "sculpt/reports.hpp"

namespace sculpt::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t to_size(const std::string& text) {
  const double v = parse_double(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.007199254740992e15) {
    throw ParameterError("not a non-negative integer: '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParameterError("not an unsigned integer: '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& cell : split_csv_line(text)) {
    std::string t = trim(cell);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

struct Key {
  std::string name;
  bool required;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

// `accessor` is a generic lambda returning a reference to the field.
template <typename Access>
Key real_key(std::string name, bool required, Access accessor) {
  return {std::move(name), required,
          [accessor](const RunConfig& c) { return format_double(accessor(c)); },
          [accessor](RunConfig& c, const std::string& v) { accessor(c) = parse_double(v); }};
}

template <typename Access>
Key size_key(std::string name, bool required, Access accessor) {
  return {std::move(name), required,
          [accessor](const RunConfig& c) { return std::to_string(accessor(c)); },
          [accessor](RunConfig& c, const std::string& v) { accessor(c) = to_size(v); }};
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    // TrainConfig, field names verbatim.
    k.push_back(size_key("total_steps", true, [](auto& c) -> auto& { return c.train.total_steps; }));
    k.push_back(size_key("warmup_steps", true, [](auto& c) -> auto& { return c.train.warmup_steps; }));
    k.push_back(real_key("learning_rate", true, [](auto& c) -> auto& { return c.train.learning_rate; }));
    k.push_back(real_key("momentum", true, [](auto& c) -> auto& { return c.train.momentum; }));
    k.push_back(size_key("batch_size", true, [](auto& c) -> auto& { return c.train.batch_size; }));
    k.push_back(real_key("retained_density", true, [](auto& c) -> auto& { return c.train.retained_density; }));
    k.push_back(real_key("omega", true, [](auto& c) -> auto& { return c.train.omega; }));
    k.push_back(real_key("epsilon", true, [](auto& c) -> auto& { return c.train.epsilon; }));
    k.push_back(real_key("alpha", true, [](auto& c) -> auto& { return c.train.alpha; }));
    k.push_back(real_key("beta", true, [](auto& c) -> auto& { return c.train.beta; }));
    k.push_back({"seed", true, [](const RunConfig& c) { return std::to_string(c.train.seed); },
                 [](RunConfig& c, const std::string& v) { c.train.seed = to_u64(v); }});
    k.push_back({"baseline", true, [](const RunConfig& c) { return std::string(to_string(c.train.baseline)); },
                 [](RunConfig& c, const std::string& v) { c.train.baseline = parse_baseline(v); }});
    k.push_back({"reg_tags", true,
                 [](const RunConfig& c) {
                   if (c.train.reg_tags.empty()) return std::string("auto");
                   return join(c.train.reg_tags, [](RegTag t) { return std::string(to_string(t)); });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.train.reg_tags.clear();
                   if (v == "auto") return;
                   for (const auto& t : split_list(v)) c.train.reg_tags.push_back(parse_reg_tag(t));
                 }});
    k.push_back({"retention_norm", true,
                 [](const RunConfig& c) { return std::string(to_string(c.train.retention_norm)); },
                 [](RunConfig& c, const std::string& v) { c.train.retention_norm = parse_weight_norm(v); }});
    k.push_back(real_key("l2_lambda", true, [](auto& c) -> auto& { return c.train.l2_lambda; }));
    k.push_back(real_key("dare_drop", true, [](auto& c) -> auto& { return c.train.dare_drop; }));

    // Toy architecture.
    k.push_back(size_key("input_dim", true, [](auto& c) -> auto& { return c.arch.input_dim; }));
    k.push_back({"hidden_dims", true,
                 [](const RunConfig& c) {
                   return join(c.arch.hidden_dims, [](std::size_t d) { return std::to_string(d); });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.arch.hidden_dims.clear();
                   for (const auto& t : split_list(v)) c.arch.hidden_dims.push_back(to_size(t));
                 }});
    k.push_back(size_key("output_dim", true, [](auto& c) -> auto& { return c.arch.output_dim; }));
    k.push_back(size_key("rank", true, [](auto& c) -> auto& { return c.arch.rank; }));
    k.push_back(real_key("lora_scale", true, [](auto& c) -> auto& { return c.arch.lora_scale; }));
    k.push_back(size_key("connector_layers", true, [](auto& c) -> auto& { return c.arch.connector_layers; }));

    // Synthetic tasks.
    k.push_back(size_key("source_tasks", true, [](auto& c) -> auto& { return c.task.source_count; }));
    k.push_back(size_key("teacher_hidden", true, [](auto& c) -> auto& { return c.task.teacher_hidden; }));
    k.push_back(real_key("teacher_gain", true, [](auto& c) -> auto& { return c.task.teacher_gain; }));
    k.push_back(real_key("input_shift", true, [](auto& c) -> auto& { return c.task.input_shift; }));
    k.push_back(real_key("input_std", true, [](auto& c) -> auto& { return c.task.input_std; }));
    k.push_back(real_key("output_scale", true, [](auto& c) -> auto& { return c.task.output_scale; }));
    k.push_back(real_key("noise", true, [](auto& c) -> auto& { return c.task.noise; }));

    // Pretraining of the frozen base.
    k.push_back(size_key("pretrain_steps", true, [](auto& c) -> auto& { return c.pretrain.steps; }));
    k.push_back(real_key("pretrain_learning_rate", true, [](auto& c) -> auto& { return c.pretrain.learning_rate; }));
    k.push_back(real_key("pretrain_momentum", true, [](auto& c) -> auto& { return c.pretrain.momentum; }));
    k.push_back(size_key("pretrain_batch_size", true, [](auto& c) -> auto& { return c.pretrain.batch_size; }));

    // Optional: theory validation.
    k.push_back(size_key("theory_p", false, [](auto& c) -> auto& { return c.theory.p; }));
    k.push_back(size_key("theory_q", false, [](auto& c) -> auto& { return c.theory.q; }));
    k.push_back(size_key("theory_r", false, [](auto& c) -> auto& { return c.theory.r; }));
    k.push_back(real_key("theory_s_a", false, [](auto& c) -> auto& { return c.theory.s_a; }));
    k.push_back(real_key("theory_s_b", false, [](auto& c) -> auto& { return c.theory.s_b; }));
    k.push_back({"theory_mode", false, [](const RunConfig& c) { return std::string(to_string(c.theory.sampling)); },
                 [](RunConfig& c, const std::string& v) { c.theory.sampling = parse_sampling_mode(v); }});
    k.push_back(real_key("theory_hetero_half_width", false,
                         [](auto& c) -> auto& { return c.theory.hetero_half_width; }));
    k.push_back(size_key("theory_trials", false, [](auto& c) -> auto& { return c.theory_trials; }));
    k.push_back(real_key("theory_delta", false, [](auto& c) -> auto& { return c.theory_delta; }));

    // Optional: sweep axis and output directory.
    k.push_back({"sweep_param", false, [](const RunConfig& c) { return c.sweep ? c.sweep->param : std::string("none"); },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "none") {
                     c.sweep.reset();
                     return;
                   }
                   if (!is_sweep_param(v)) throw ParameterError("unknown sweep parameter '" + v + "'");
                   if (!c.sweep) c.sweep.emplace();
                   c.sweep->param = v;
                 }});
    k.push_back({"sweep_values", false,
                 [](const RunConfig& c) {
                   return c.sweep ? join(c.sweep->values, [](double d) { return format_double(d); }) : std::string();
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (!c.sweep) c.sweep.emplace();
                   c.sweep->values.clear();
                   for (const auto& t : split_list(v)) c.sweep->values.push_back(parse_double(t));
                 }});
    k.push_back({"out_dir", false, [](const RunConfig& c) { return c.out_dir; },
                 [](RunConfig& c, const std::string& v) { c.out_dir = v; }});
    return k;
  }();
  return table;
}

}  // namespace

TaskOptions RunConfig::resolved_task() const {
  TaskOptions t = task;
  t.input_dim = arch.input_dim;
  t.output_dim = arch.output_dim;
  t.seed = train.seed;
  return t;
}

RunConfig default_run_config() {
  RunConfig c;
  c.train.warmup_steps = default_warmup(c.train.total_steps);
  return c;
}

std::vector<std::string> required_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table())
    if (k.required) out.push_back(k.name);
  return out;
}

RunConfig parse_run_config(std::istream& in) {
  std::map<std::string, const Key*> by_name;
  for (const auto& k : key_table()) by_name[k.name] = &k;

  RunConfig cfg = default_run_config();
  // Sweep keys may arrive in either order; apply them after everything else.
  std::optional<std::string> sweep_param, sweep_values;
  std::set<std::string> seen;
  std::vector<std::string> unknown, malformed, duplicate;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      malformed.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) {
      unknown.push_back(key);
      continue;
    }
    if (!seen.insert(key).second) duplicate.push_back(key);
    if (key == "sweep_param") {
      sweep_param = value;
      continue;
    }
    if (key == "sweep_values") {
      sweep_values = value;
      continue;
    }
    try {
      it->second->set(cfg, value);
    } catch (const std::exception& e) {
      malformed.push_back(key + ": " + e.what());
    }
  }
  try {
    if (sweep_param) by_name["sweep_param"]->set(cfg, *sweep_param);
    if (sweep_values && cfg.sweep) by_name["sweep_values"]->set(cfg, *sweep_values);
  } catch (const std::exception& e) {
    malformed.push_back(std::string("sweep: ") + e.what());
  }

  std::vector<std::string> missing;
  for (const auto& k : key_table())
    if (k.required && !seen.contains(k.name)) missing.push_back(k.name);

  if (!unknown.empty() || !missing.empty() || !malformed.empty() || !duplicate.empty()) {
    std::string msg = "invalid config";
    auto list = [&msg](const char* label, const std::vector<std::string>& items) {
      if (items.empty()) return;
      msg += "\n  ";
      msg += label;
      for (std::size_t i = 0; i < items.size(); ++i) msg += (i ? ", " : " ") + items[i];
    };
    list("unknown keys:", unknown);
    list("missing keys:", missing);
    list("duplicate keys:", duplicate);
    list("malformed:", malformed);
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in);
}

void write_run_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& k : key_table()) {
    if (k.name == "sweep_values" && !cfg.sweep) continue;
    if (k.name == "out_dir" && cfg.out_dir.empty()) continue;
    out << k.name << " = " << k.get(cfg) << '\n';
  }
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream os;
  write_run_config(os, cfg);
  return os.str();
}

bool is_sweep_param(const std::string& param) {
  return param == "s" || param == "alpha" || param == "omega" || param == "beta";
}

void apply_sweep_value(RunConfig& cfg, const std::string& param, double value) {
  if (param == "s") {
    cfg.train.retained_density = value;
  } else if (param == "alpha") {
    cfg.train.alpha = value;
  } else if (param == "omega") {
    cfg.train.omega = value;
  } else if (param == "beta") {
    cfg.train.beta = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + param + "' (expected s|alpha|omega|beta)");
  }
}

}  // namespace sculpt::cli
