// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/nn/reference.hpp"

#include "ttrec/error.hpp"

namespace ttrec::nn::serial {

std::vector<double> forward(const Mlp& net, const std::vector<double>& x) {
  require(static_cast<int>(x.size()) == net.input_dim(), Errc::dimension_mismatch,
          "serial forward: input size != network input dim");
  std::vector<double> a = x;
  const std::size_t L = net.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    const auto& W = net.layers[l].weights;
    const auto& b = net.layers[l].bias;
    std::vector<double> z(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double acc = b[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j) acc += W(i, j) * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = (l + 1 < L) ? activate(net.activation, acc) : acc;
    }
    a = std::move(z);
  }
  return a;
}

FlatGrad backward(const Mlp& net, const std::vector<double>& x,
                  const std::vector<double>& upstream) {
  const std::size_t L = net.layers.size();
  require(static_cast<int>(upstream.size()) == net.output_dim(), Errc::dimension_mismatch,
          "serial backward: upstream size != network output dim");

  // Forward, keeping pre-activations and activations per layer.
  std::vector<std::vector<double>> acts(L + 1), preacts(L);
  acts[0] = x;
  for (std::size_t l = 0; l < L; ++l) {
    const auto& W = net.layers[l].weights;
    const auto& b = net.layers[l].bias;
    preacts[l].resize(static_cast<std::size_t>(W.rows()));
    acts[l + 1].resize(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double acc = b[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        acc += W(i, j) * acts[l][static_cast<std::size_t>(j)];
      preacts[l][static_cast<std::size_t>(i)] = acc;
      acts[l + 1][static_cast<std::size_t>(i)] =
          (l + 1 < L) ? activate(net.activation, acc) : acc;
    }
  }

  FlatGrad g;
  g.weights.resize(L);
  g.bias.resize(L);
  std::vector<double> delta = upstream;
  for (std::size_t l = L; l-- > 0;) {
    const auto& W = net.layers[l].weights;
    const auto rows = static_cast<std::size_t>(W.rows());
    const auto cols = static_cast<std::size_t>(W.cols());
    g.weights[l].assign(rows * cols, 0.0);
    g.bias[l].assign(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) g.weights[l][i * cols + j] = delta[i] * acts[l][j];
      g.bias[l][i] = delta[i];
    }
    if (l > 0) {
      std::vector<double> back(cols, 0.0);
      for (std::size_t j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
          acc += W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * delta[i];
        back[j] = acc * activate_deriv(net.activation, preacts[l - 1][j]);
      }
      delta = std::move(back);
    }
  }
  return g;
}

}  // namespace ttrec::nn::serial
