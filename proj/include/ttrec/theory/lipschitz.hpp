// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Randomized search for violations of the parameter-Lipschitz property: for
// networks drawn from the bounded class (widths <= W, entries in [-B, B]) and
// perturbations with sup-norm at most eps that stay inside the class,
//   | f(x; theta) - f(x; theta') |_2  <=  p * C(W, L, B) * eps
// must hold for every input with |x|_inf <= 1.

#pragma once

#include <cstdint>

#include "ttrec/nn/mlp.hpp"

namespace ttrec::theory {

struct LipschitzFamily {
  int input_dim = 0;   // <= width, so every row's support stays within W
  int width = 0;       // hidden width W
  int depth = 0;       // layer count L
  double B = 0.0;      // entry magnitude cap
  int p = 0;           // output dimension
};

void validate(const LipschitzFamily& family);

struct LipschitzReport {
  int trials = 0;
  int violations = 0;      // trials where the observed ratio exceeded 1
  double max_ratio = 0.0;  // max over trials of observed / bound
  double bound = 0.0;      // p * C(W, L, B) * eps
};

// Each trial draws a net from the family, perturbs every parameter by at
// most eps (clamped back into [-B, B]), draws an input with |x|_inf <= 1,
// and compares the output displacement against the bound.
LipschitzReport verify_lipschitz(const LipschitzFamily& family, double eps, int trials,
                                 std::uint64_t seed = 0);

}  // namespace ttrec::theory
