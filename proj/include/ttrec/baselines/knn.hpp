// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Top-K neighborhood predictor with mean-squared-difference similarity
//   sim(a,b) = 1 / (msd(a,b) + 1),
// msd taken over co-rated entries; a single common rating suffices for a
// link. Prediction averages the top-K linked neighbors that rated the target,
// weighted by similarity, with equal similarities broken toward the lower id.

#pragma once

#include <Eigen/Dense>

#include "ttrec/baselines/common.hpp"
#include "ttrec/data/observations.hpp"

namespace ttrec::baselines {

enum class KnnMode { user_based, item_based };

struct KnnModel {
  RatingIndex index;
  KnnMode mode = KnnMode::user_based;
  int k = 0;
  // Dense symmetric similarity over the agent side (users in user_based mode,
  // items otherwise); 0 marks an unlinked pair, the diagonal stays 0 because
  // an id is never its own neighbor. Linked values lie in (0, 1].
  Eigen::MatrixXd similarity;
  double global_mean = 0.0;
};

struct KnnPrediction {
  double value = 0.0;
  bool fallback = false;  // true when no linked neighbor rated the target
};

KnnModel fit_knn(const data::ObservationSet& data, KnnMode mode, int k);

KnnPrediction predict_knn(const KnnModel& model, std::int64_t user, std::int64_t item);

}  // namespace ttrec::baselines
