// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/adapter_io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "sculpt/errors.hpp"
#include "sculpt/reports.hpp"

namespace sculpt {

namespace {

void write_rows(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_bits(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (m(i, j) != 0.0 ? '1' : '0');
    out << '\n';
  }
}

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw ConfigError(std::string("adapter file: unexpected end while reading ") + what);
  return tok;
}

void expect(std::istream& in, const std::string& keyword) {
  const std::string tok = next_token(in, keyword.c_str());
  if (tok != keyword) throw ConfigError("adapter file: expected '" + keyword + "', found '" + tok + "'");
}

std::size_t read_size(std::istream& in, const char* what) {
  const std::string tok = next_token(in, what);
  const double v = parse_double(tok);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError(std::string("adapter file: bad ") + what + " '" + tok + "'");
  }
  return static_cast<std::size_t>(v);
}

double read_value(std::istream& in, const char* what) { return parse_double(next_token(in, what)); }

Matrix read_rows(std::istream& in, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = read_value(in, "matrix entry");
  return m;
}

Matrix read_bits(std::istream& in, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string line = next_token(in, "mask row");
    if (line.size() != cols) throw ConfigError("adapter file: mask row has wrong length");
    for (std::size_t j = 0; j < cols; ++j) {
      if (line[j] != '0' && line[j] != '1') throw ConfigError("adapter file: mask bits must be 0 or 1");
      m(i, j) = line[j] == '1' ? 1.0 : 0.0;
    }
  }
  return m;
}

}  // namespace

void write_adapter(std::ostream& out, const LoraAdapter& adapter, const Matrix* delta_override) {
  out << "adapter " << adapter.out_dim() << ' ' << adapter.in_dim() << ' ' << adapter.rank() << ' '
      << format_double(adapter.scale) << ' ' << format_double(adapter.density_a) << ' '
      << format_double(adapter.density_b) << ' ' << (adapter.has_masks() ? 1 : 0) << ' '
      << (delta_override ? 1 : 0) << '\n';
  write_rows(out, adapter.b);
  write_rows(out, adapter.a);
  if (adapter.has_masks()) {
    write_bits(out, *adapter.mask_b);
    write_bits(out, *adapter.mask_a);
  }
  if (delta_override) write_rows(out, *delta_override);
}

LoraAdapter read_adapter(std::istream& in, std::optional<Matrix>* delta_override) {
  expect(in, "adapter");
  const std::size_t p = read_size(in, "p");
  const std::size_t q = read_size(in, "q");
  const std::size_t r = read_size(in, "r");
  LoraAdapter adapter;
  adapter.scale = read_value(in, "scale");
  adapter.density_a = read_value(in, "s_a");
  adapter.density_b = read_value(in, "s_b");
  const std::size_t has_masks = read_size(in, "mask flag");
  const std::size_t has_delta = read_size(in, "delta flag");
  adapter.b = read_rows(in, p, r);
  adapter.a = read_rows(in, r, q);
  if (has_masks) {
    adapter.mask_b = read_bits(in, p, r);
    adapter.mask_a = read_bits(in, r, q);
  }
  if (has_delta) {
    Matrix delta = read_rows(in, p, q);
    if (delta_override) *delta_override = std::move(delta);
  } else if (delta_override) {
    delta_override->reset();
  }
  return adapter;
}

void write_adapters(std::ostream& out, const ToyModel& model) {
  out << "sculpt-adapters 1\nlayers " << model.layers.size() << '\n';
  for (const auto& layer : model.layers) {
    write_adapter(out, layer.adapter, layer.delta_override ? &*layer.delta_override : nullptr);
  }
}

void read_adapters(std::istream& in, ToyModel& model) {
  expect(in, "sculpt-adapters");
  expect(in, "1");
  expect(in, "layers");
  const std::size_t n = read_size(in, "layer count");
  if (n != model.layers.size()) throw ConfigError("adapter file: layer count does not match model");
  for (auto& layer : model.layers) {
    std::optional<Matrix> delta;
    LoraAdapter adapter = read_adapter(in, &delta);
    if (adapter.out_dim() != layer.w0.rows() || adapter.in_dim() != layer.w0.cols()) {
      throw ConfigError("adapter file: adapter shape does not match base weight");
    }
    layer.adapter = std::move(adapter);
    layer.delta_override = std::move(delta);
  }
}

void write_model(std::ostream& out, const ToyModel& model) {
  out << "sculpt-model 1\nlayers " << model.layers.size() << '\n';
  for (const auto& layer : model.layers) {
    out << "layer " << to_string(layer.role) << ' ' << (layer.activation ? 1 : 0) << '\n';
    out << "w0 " << layer.w0.rows() << ' ' << layer.w0.cols() << '\n';
    write_rows(out, layer.w0);
    write_adapter(out, layer.adapter, layer.delta_override ? &*layer.delta_override : nullptr);
  }
}

ToyModel read_model(std::istream& in) {
  expect(in, "sculpt-model");
  expect(in, "1");
  expect(in, "layers");
  const std::size_t n = read_size(in, "layer count");
  ToyModel model;
  for (std::size_t l = 0; l < n; ++l) {
    expect(in, "layer");
    Layer layer;
    layer.role = parse_layer_role(next_token(in, "role"));
    layer.activation = read_size(in, "activation") != 0;
    expect(in, "w0");
    const std::size_t p = read_size(in, "rows");
    const std::size_t q = read_size(in, "cols");
    layer.w0 = read_rows(in, p, q);
    layer.adapter = read_adapter(in, &layer.delta_override);
    if (layer.adapter.out_dim() != p || layer.adapter.in_dim() != q) {
      throw ConfigError("model file: adapter shape does not match base weight");
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

}  // namespace sculpt
