// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Hidden-layer nonlinearities. The derivative convention at the ReLU kink is
// pinned: relu'(0) = 0.

#pragma once

#include <cmath>
#include <string>

#include "ttrec/error.hpp"

namespace ttrec::nn {

enum class Activation { relu, sigmoid };

inline double activate(Activation a, double z) {
  if (a == Activation::relu) return z > 0.0 ? z : 0.0;
  // Numerically stable logistic on both tails.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Derivative with respect to the pre-activation.
inline double activate_deriv(Activation a, double z) {
  if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
  const double s = activate(Activation::sigmoid, z);
  return s * (1.0 - s);
}

inline const char* activation_name(Activation a) {
  return a == Activation::relu ? "relu" : "sigmoid";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  fail(Errc::config_invalid, "unknown activation: '" + s + "' (expected relu or sigmoid)");
}

}  // namespace ttrec::nn
