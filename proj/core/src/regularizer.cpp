// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include "sculpt/regularizer.hpp"

#include <string>

#include "sculpt/errors.hpp"

namespace sculpt {

namespace {

// Returns the masked factors and their (unscaled) product, checking the mask shape.
struct Factors {
  Matrix b;
  Matrix a;
  Matrix product;
};

Factors effective_factors(const RetentionMask& mask, const LoraAdapter& adapter, const char* op) {
  Factors f;
  if (adapter.has_masks()) {
    f.b = hadamard(*adapter.mask_b, adapter.b);
    f.a = hadamard(*adapter.mask_a, adapter.a);
  } else {
    f.b = adapter.b;
    f.a = adapter.a;
  }
  if (mask.m.rows() != f.b.rows() || mask.m.cols() != f.a.cols()) {
    throw DimensionError(std::string(op) + ": retention mask is " + mask.m.shape_string() +
                         " but adapter product is " + std::to_string(f.b.rows()) + "x" +
                         std::to_string(f.a.cols()));
  }
  f.product = matmul(f.b, f.a);
  return f;
}

}  // namespace

std::string_view to_string(RegTag tag) noexcept {
  switch (tag) {
    case RegTag::frobenius: return "frobenius";
    case RegTag::l1: return "l1";
    case RegTag::none: break;
  }
  return "none";
}

RegTag parse_reg_tag(std::string_view text) {
  if (text == "none") return RegTag::none;
  if (text == "frobenius") return RegTag::frobenius;
  if (text == "l1") return RegTag::l1;
  throw ParameterError("unknown regularizer tag '" + std::string(text) + "'");
}

double cmr_frobenius(const RetentionMask& mask, const LoraAdapter& adapter) {
  const Factors f = effective_factors(mask, adapter, "cmr_frobenius");
  return frobenius_norm(hadamard(mask.m, f.product));
}

double cmr_l1(const RetentionMask& mask, const LoraAdapter& adapter) {
  const Factors f = effective_factors(mask, adapter, "cmr_l1");
  return l1_norm(hadamard(mask.m, f.product));
}

RegGrad cmr_frobenius_grad(const RetentionMask& mask, const LoraAdapter& adapter) {
  const Factors f = effective_factors(mask, adapter, "cmr_frobenius_grad");
  const Matrix weighted = hadamard(mask.m, f.product);
  RegGrad out;
  out.loss = frobenius_norm(weighted);
  if (out.loss <= kFrobeniusKinkFloor) {
    out.grad_b = Matrix::zeros(f.b.rows(), f.b.cols());
    out.grad_a = Matrix::zeros(f.a.rows(), f.a.cols());
    return out;
  }
  const Matrix p = scaled(hadamard(mask.m, weighted), 1.0 / out.loss);
  out.grad_b = matmul_nt(p, f.a);
  out.grad_a = matmul_tn(f.b, p);
  return out;
}

RegGrad cmr_l1_grad(const RetentionMask& mask, const LoraAdapter& adapter) {
  const Factors f = effective_factors(mask, adapter, "cmr_l1_grad");
  Matrix g(f.product.rows(), f.product.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = f.product[i];
    const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    g[i] = mask.m[i] * sign;
    loss += std::abs(mask.m[i] * v);
  }
  RegGrad out;
  out.loss = loss;
  out.grad_b = matmul_nt(g, f.a);
  out.grad_a = matmul_tn(f.b, g);
  return out;
}

double total_loss(double task_loss, std::span<const double> frob_terms,
                  std::span<const double> l1_terms, const RegularizerConfig& cfg) {
  double frob = 0.0;
  for (double t : frob_terms) frob += t;
  double l1 = 0.0;
  for (double t : l1_terms) l1 += t;
  return task_loss + cfg.alpha * frob + cfg.beta * l1;
}

}  // namespace sculpt
