// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Regularized SVD fit by alternating least squares: each half-sweep solves
// every user's (then every item's) ridge problem over its observed ratings
// exactly, so the objective
//   sum (r - <p_u, q_i>)^2 + reg * (|P|_F^2 + |Q|_F^2)
// never increases.

#pragma once

#include <Eigen/Dense>

#include "ttrec/baselines/common.hpp"
#include "ttrec/data/observations.hpp"

namespace ttrec::baselines {

struct MfModel {
  RatingIndex index;
  Eigen::MatrixXd user_factors;  // rated users x rank
  Eigen::MatrixXd item_factors;  // rated items x rank
  double global_mean = 0.0;
  double reg = 0.0;
  int rank = 0;
  // Objective value at init and after every half-sweep (2 per full sweep);
  // alternating exact ridge solves make this sequence non-increasing.
  std::vector<double> objective_trace;
};

// iters counts full sweeps (one user half-sweep plus one item half-sweep).
// Item factors start from a small deterministic gaussian draw so the first
// user solve has something to regress on; user factors start at zero.
MfModel fit_rsvd(const data::ObservationSet& data, int rank, double reg, int iters,
                 std::uint64_t seed = 0);

// <p_u, q_i> when both ids carry training ratings; global-mean fallback for
// ids outside the training universe.
double predict_mf(const MfModel& model, std::int64_t user, std::int64_t item);

// Training objective at the current factors (the ALS monotonicity quantity).
double mf_objective(const MfModel& model);

}  // namespace ttrec::baselines
