// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense multilayer perceptron with a linear last layer. Evaluation and
// reverse-mode gradients come in single-sample and batched (GEMM) forms; the
// batched forms are the hot path for training, the single-sample forms are
// the readable contract. A scalar straight-line twin lives in reference.hpp
// and serves as the independent oracle in tests and benchmarks.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ttrec/nn/activations.hpp"
#include "ttrec/rng.hpp"

namespace ttrec::nn {

struct LayerParams {
  Eigen::MatrixXd weights;  // rows = outputs, cols = inputs
  Eigen::VectorXd bias;     // size = outputs
};

struct Mlp {
  std::vector<LayerParams> layers;
  Activation activation = Activation::relu;  // hidden layers only; last layer is linear

  int input_dim() const { return static_cast<int>(layers.front().weights.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().weights.rows()); }
  int depth() const { return static_cast<int>(layers.size()); }
};

// Shape/finiteness invariants; throws Errc::config_invalid or
// Errc::dimension_mismatch with the offending layer named.
void validate(const Mlp& net);

Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& x);

// Rows are samples: X is batch x input_dim, result is batch x output_dim.
Eigen::MatrixXd forward_batch(const Mlp& net, const Eigen::MatrixXd& X);

struct MlpGrad {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> bias;

  void setZero();
  void add_scaled(const MlpGrad& other, double scale);
};

MlpGrad make_zero_grad(const Mlp& net);

// Gradient of <upstream, f(x)> with respect to every weight and bias.
MlpGrad backward(const Mlp& net, const Eigen::VectorXd& x, const Eigen::VectorXd& upstream);

// Gradient of sum_b <upstream_b, f(x_b)> accumulated over the batch.
MlpGrad backward_batch(const Mlp& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& upstream);

struct ArchStats {
  int depth = 0;                // number of layers
  std::int64_t effective_params = 0;  // count of nonzero weights and biases
  double param_scale = 0.0;     // max absolute weight or bias entry
  double output_bound = 0.0;    // sound sup bound on |f_j(x)| over x in [0,1]^D
};

ArchStats arch_stats(const Mlp& net);

// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases.
// dims = {input, hidden..., output}; draw order is layer, then row, then column.
Mlp glorot_init(const std::vector<int>& dims, Activation act, Rng& rng);

// Versioned structured-text form. Doubles survive a round trip bit-exactly.
nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& doc);

void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

}  // namespace ttrec::nn
