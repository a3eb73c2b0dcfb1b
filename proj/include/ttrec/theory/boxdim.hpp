// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Box-counting (Minkowski) dimension estimate of a point cloud: occupied
// axis-aligned boxes of side eps are counted per scale and the dimension is
// the least-squares slope of log N(eps) against log(1/eps).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace ttrec::theory {

// Exact count of distinct boxes (floor(x/eps) per coordinate) hit by the rows
// of `points`.
std::int64_t count_occupied_boxes(const Eigen::MatrixXd& points, double eps);

struct BoxCountReport {
  double dimension = 0.0;
  std::vector<double> scales;        // as given
  std::vector<std::int64_t> counts;  // N(eps) per scale
};

// Scales: at least 3, strictly positive, pairwise distinct, spanning at least
// two octaves (max/min >= 4). Cloud: at least 100 rows. Counting across
// scales runs in parallel; `serial` forces the sequential path (identical
// results, used for benchmarking).
BoxCountReport minkowski_dimension(const Eigen::MatrixXd& points,
                                   const std::vector<double>& scales, bool serial = false);

// Dyadic defaults 2^-2 .. 2^-7.
const std::vector<double>& default_scales();

}  // namespace ttrec::theory
