// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/theory/embedding.hpp"

#include <cmath>

#include "ttrec/error.hpp"

namespace ttrec::theory {

namespace {

// Top-left corner copy of `src` into a zero rows x cols block.
Eigen::MatrixXd padded(const Eigen::MatrixXd& src, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  out.topLeftCorner(src.rows(), src.cols()) = src;
  return out;
}

Eigen::VectorXd padded(const Eigen::VectorXd& src, Eigen::Index rows) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rows);
  out.head(src.size()) = src;
  return out;
}

}  // namespace

double embedding_budget(int target_depth, int width_cap) {
  return 14.0 * static_cast<double>(target_depth) * static_cast<double>(width_cap) *
         std::log(static_cast<double>(width_cap));
}

nn::Mlp embed_network(const nn::Mlp& net, int target_depth, int width_cap) {
  nn::validate(net);
  require(net.activation == nn::Activation::relu, Errc::invalid_argument,
          "embedding is defined for ReLU networks only");
  const int depth = net.depth();
  require(depth <= target_depth, Errc::invalid_argument,
          "network deeper than the target depth");
  require(width_cap >= 2, Errc::invalid_argument, "width cap must be >= 2");
  require(nn::arch_stats(net).effective_params <= width_cap, Errc::invalid_argument,
          "nonzero-parameter count exceeds the width cap");
  const int p = net.output_dim();
  require(p <= width_cap, Errc::invalid_argument, "output dimension exceeds the width cap");
  const Eigen::Index wide = 2 * static_cast<Eigen::Index>(width_cap);
  for (int l = 0; l + 1 < depth; ++l)
    require(net.layers[static_cast<std::size_t>(l)].weights.rows() <= wide,
            Errc::invalid_argument, "hidden width exceeds twice the width cap");

  nn::Mlp out;
  out.activation = nn::Activation::relu;

  if (depth == target_depth) {
    // Same depth: zero-pad every hidden layer to the uniform width. Padded
    // units compute relu(0) = 0 and feed zero columns, so the output is
    // bit-identical to the original.
    for (int l = 0; l < depth; ++l) {
      const auto& lay = net.layers[static_cast<std::size_t>(l)];
      const Eigen::Index rows = (l + 1 == depth) ? lay.weights.rows() : wide;
      const Eigen::Index cols = (l == 0) ? lay.weights.cols() : wide;
      out.layers.push_back({padded(lay.weights, rows, cols), padded(lay.bias, rows)});
    }
    return out;
  }

  // depth < target_depth: pad the original hidden layers, then replace the
  // final linear map A, b with the duplication layer [A; -A], [b; -b] whose
  // ReLU output is (relu(y), relu(-y)); identity blocks carry that pair
  // through the remaining layers; the new final layer computes their
  // difference, which equals y exactly.
  for (int l = 0; l + 1 < depth; ++l) {
    const auto& lay = net.layers[static_cast<std::size_t>(l)];
    const Eigen::Index cols = (l == 0) ? lay.weights.cols() : wide;
    out.layers.push_back({padded(lay.weights, wide, cols), padded(lay.bias, wide)});
  }

  const auto& last = net.layers[static_cast<std::size_t>(depth - 1)];
  const Eigen::Index in_cols = (depth == 1) ? last.weights.cols() : wide;
  Eigen::MatrixXd dup = Eigen::MatrixXd::Zero(wide, in_cols);
  dup.topLeftCorner(p, last.weights.cols()) = last.weights;
  dup.block(p, 0, p, last.weights.cols()) = -last.weights;
  Eigen::VectorXd dup_b = Eigen::VectorXd::Zero(wide);
  dup_b.head(p) = last.bias;
  dup_b.segment(p, p) = -last.bias;
  out.layers.push_back({std::move(dup), std::move(dup_b)});

  for (int extra = 0; extra < target_depth - depth - 1; ++extra) {
    Eigen::MatrixXd id = Eigen::MatrixXd::Zero(wide, wide);
    for (Eigen::Index j = 0; j < 2 * p; ++j) id(j, j) = 1.0;
    out.layers.push_back({std::move(id), Eigen::VectorXd::Zero(wide)});
  }

  Eigen::MatrixXd recombine = Eigen::MatrixXd::Zero(p, wide);
  for (Eigen::Index j = 0; j < p; ++j) {
    recombine(j, j) = 1.0;
    recombine(j, p + j) = -1.0;
  }
  out.layers.push_back({std::move(recombine), Eigen::VectorXd::Zero(p)});
  return out;
}

}  // namespace ttrec::theory
