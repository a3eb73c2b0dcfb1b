// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Co-clustering recommender: users and items are grouped into clusters, and
//   rhat(u,i) = cocluster_mean + (user_mean_u - user_cluster_mean)
//                              + (item_mean_i - item_cluster_mean).
// Fitting alternates between recomputing cluster statistics and reassigning
// each user/item to the cluster that minimizes its squared error. A guard
// reverts and stops if a reassignment round ever increases the training SSE,
// so the recorded SSE sequence is non-increasing by construction.

#pragma once

#include <Eigen/Dense>

#include "ttrec/baselines/common.hpp"
#include "ttrec/data/observations.hpp"

namespace ttrec::baselines {

struct CoClusterModel {
  RatingIndex index;
  std::vector<int> user_cluster;      // per rated user, in {0..g_u-1}
  std::vector<int> item_cluster;      // per rated item, in {0..g_i-1}
  Eigen::MatrixXd cocluster_mean;     // g_u x g_i, empty cells hold global_mean
  Eigen::VectorXd user_cluster_mean;  // rating mean per user cluster
  Eigen::VectorXd item_cluster_mean;
  Eigen::VectorXd user_mean;          // per rated user
  Eigen::VectorXd item_mean;
  double global_mean = 0.0;
  // Training SSE at init and after each reassignment round.
  std::vector<double> sse_trace;
};

// iters bounds the reassignment rounds; the fit also stops when assignments
// reach a fixed point or when the SSE guard fires. Initial assignments are
// drawn uniformly from the seeded generator.
CoClusterModel fit_cocluster(const data::ObservationSet& data, int g_u, int g_i, int iters,
                             std::uint64_t seed = 0);

// Full formula for known ids; unknown user (item) falls back to the item
// (user) marginal mean, and to the global mean when both are unknown.
double predict_cocluster(const CoClusterModel& model, std::int64_t user, std::int64_t item);

// Training SSE of the model's current assignments and statistics.
double cocluster_sse(const CoClusterModel& model);

}  // namespace ttrec::baselines
