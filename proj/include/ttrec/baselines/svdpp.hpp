// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// SVD++ matrix factorization with implicit feedback:
//   rhat(u,i) = mu + b_u + b_i + q_i . (p_u + |N(u)|^{-1/2} sum_{j in N(u)} y_j)
// where N(u) is the set of items rated by u, fit by SGD on the squared error
// with one shared regularization strength.

#pragma once

#include <Eigen/Dense>

#include "ttrec/baselines/common.hpp"
#include "ttrec/data/observations.hpp"

namespace ttrec::baselines {

struct SvdPpModel {
  RatingIndex index;
  Eigen::MatrixXd user_factors;      // p: rated users x rank
  Eigen::MatrixXd item_factors;      // q: rated items x rank
  Eigen::MatrixXd implicit_factors;  // y: rated items x rank
  Eigen::VectorXd user_bias;
  Eigen::VectorXd item_bias;
  double global_mean = 0.0;
  double reg = 0.0;
  int rank = 0;
  // Regularized objective at init and after every SGD epoch.
  std::vector<double> objective_trace;
};

// SGD over the ratings in stored order, `epochs` passes. Factors start from
// N(0, init_std^2) draws (init_std 0 gives the all-zero start), biases at 0.
SvdPpModel fit_svdpp(const data::ObservationSet& data, int rank, double reg, double lr,
                     int epochs, double init_std = 0.1, std::uint64_t seed = 0);

// Full model formula for ids with training ratings; ids outside the training
// universe fall back to the global mean.
double predict_svdpp(const SvdPpModel& model, std::int64_t user, std::int64_t item);

// Squared error plus reg times the squared norm of every parameter block
// (biases, p, q, y): the quantity one SGD epoch is expected to decrease.
double svdpp_objective(const SvdPpModel& model);

}  // namespace ttrec::baselines
