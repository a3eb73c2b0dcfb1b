// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/theory/lipschitz.hpp"

#include <algorithm>

#include "ttrec/error.hpp"
#include "ttrec/rng.hpp"
#include "ttrec/theory/calculators.hpp"

namespace ttrec::theory {

void validate(const LipschitzFamily& family) {
  require(family.width >= 1 && family.depth >= 1, Errc::invalid_argument,
          "Lipschitz family needs width >= 1 and depth >= 1");
  require(family.input_dim >= 1 && family.input_dim <= family.width, Errc::invalid_argument,
          "Lipschitz family needs 1 <= input_dim <= width");
  require(family.B > 0.0, Errc::invalid_argument, "Lipschitz family needs B > 0");
  require(family.p >= 1, Errc::invalid_argument, "Lipschitz family needs p >= 1");
}

namespace {

nn::Mlp draw_member(const LipschitzFamily& family, Rng& rng) {
  nn::Mlp net;
  net.activation = nn::Activation::relu;
  int in = family.input_dim;
  for (int l = 0; l < family.depth; ++l) {
    const int out_dim = (l + 1 == family.depth) ? family.p : family.width;
    Eigen::MatrixXd w(out_dim, in);
    Eigen::VectorXd b(out_dim);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-family.B, family.B);
      b[i] = rng.uniform(-family.B, family.B);
    }
    net.layers.push_back({std::move(w), std::move(b)});
    in = out_dim;
  }
  return net;
}

// Shift by at most eps, then clamp into the class box; clamping can only
// shrink the shift, so |theta' - theta|_inf <= eps still holds.
nn::Mlp perturb_member(const nn::Mlp& net, double eps, double B, Rng& rng) {
  nn::Mlp other = net;
  for (auto& lay : other.layers) {
    for (Eigen::Index i = 0; i < lay.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < lay.weights.cols(); ++j)
        lay.weights(i, j) = std::clamp(lay.weights(i, j) + rng.uniform(-eps, eps), -B, B);
    for (Eigen::Index i = 0; i < lay.bias.size(); ++i)
      lay.bias[i] = std::clamp(lay.bias[i] + rng.uniform(-eps, eps), -B, B);
  }
  return other;
}

}  // namespace

LipschitzReport verify_lipschitz(const LipschitzFamily& family, double eps, int trials,
                                 std::uint64_t seed) {
  validate(family);
  require(eps > 0.0, Errc::invalid_argument, "perturbation size must be positive");
  require(trials >= 1, Errc::invalid_argument, "need at least one trial");

  LipschitzReport report;
  report.trials = trials;
  report.bound =
      static_cast<double>(family.p) * lipschitz_constant(family.width, family.depth, family.B) *
      eps;

  Rng rng(derive_seed(seed, 31));
  for (int t = 0; t < trials; ++t) {
    const nn::Mlp net = draw_member(family, rng);
    const nn::Mlp other = perturb_member(net, eps, family.B, rng);
    Eigen::VectorXd x(family.input_dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    const double diff = (nn::forward(net, x) - nn::forward(other, x)).norm();
    const double ratio = diff / report.bound;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (ratio > 1.0) ++report.violations;
  }
  return report;
}

}  // namespace ttrec::theory
