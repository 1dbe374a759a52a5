// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

#include "sculpt/adapter.hpp"
#include "sculpt/model.hpp"

namespace sculpt {

// Line-oriented text containers. Numbers use the shortest round-trip decimal
// form, so a save/load cycle reproduces every double bit-for-bit.
//
// Adapter block:
//   adapter <p> <q> <r> <scale> <s_a> <s_b> <has_masks> <has_delta>
//   <p lines of r values: B>
//   <r lines of q values: A>
//   [<p lines of r bits: mask_B> <r lines of q bits: mask_A>]   if has_masks
//   [<p lines of q values: dense delta override>]              if has_delta
//
// Adapter file:  "sculpt-adapters 1", "layers <L>", then L adapter blocks.
// Model file:    "sculpt-model 1", "layers <L>", then per layer
//                "layer <role> <activation>", "w0 <p> <q>", p rows of W0,
//                followed by the layer's adapter block.

void write_adapter(std::ostream& out, const LoraAdapter& adapter, const Matrix* delta_override = nullptr);
/// Reads one adapter block; `delta_override` receives the dense delta when present.
LoraAdapter read_adapter(std::istream& in, std::optional<Matrix>* delta_override = nullptr);

void write_adapters(std::ostream& out, const ToyModel& model);
/// Installs the adapters stored in `in` into `model` (layer count and shapes must match).
void read_adapters(std::istream& in, ToyModel& model);

void write_model(std::ostream& out, const ToyModel& model);
ToyModel read_model(std::istream& in);

}  // namespace sculpt
