// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial straight-line re-evaluations of the network math: plain loops over
// std::vector, no Eigen, no OpenMP. Kept as the independent oracle for the
// optimized kernels and as the baseline side of the benchmark tool.

#pragma once

#include <vector>

#include "ttrec/nn/mlp.hpp"

namespace ttrec::nn::serial {

std::vector<double> forward(const Mlp& net, const std::vector<double>& x);

// Gradient of <upstream, f(x)>, laid out like the network (per layer: row-major
// weights then bias), accumulated with scalar loops only.
struct FlatGrad {
  std::vector<std::vector<double>> weights;  // per layer, row-major
  std::vector<std::vector<double>> bias;
};

FlatGrad backward(const Mlp& net, const std::vector<double>& x,
                  const std::vector<double>& upstream);

}  // namespace ttrec::nn::serial
