// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Empirical estimation-rate probe: for each intrinsic covariate dimension d,
// train the two-tower model at one fixed regularization value across an
// increasing grid of observation counts, record the excess test MSE (test MSE
// minus the known noise variance), and fit the slope of log(excess) against
// log |Omega|. Cells (d, omega, replication) are seeded independently as
// base_seed + cell index, so they may run concurrently.

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "ttrec/harness/experiment.hpp"
#include "ttrec/synth/generator.hpp"

namespace ttrec::theory {

struct RateProbeConfig {
  synth::SyntheticSpec spec;  // template; intrinsic_dim/n_ratings/seed set per cell
  std::vector<int> intrinsic_dims{20, 40};
  std::vector<std::int64_t> omega_grid{2500, 5000, 10000, 20000};
  int replications = 2;
  double split_ratio = 0.7;
  double lambda = 1e-6;  // fixed for the whole probe; no grid search
  harness::T2RecSettings t2rec;
  std::uint64_t base_seed = 0;
  // A mean excess at or below this leaves log undefined; the dimension's
  // slope is then reported as degenerate instead of a number.
  double degenerate_tol = 1e-12;
};

void validate(const RateProbeConfig& cfg);

struct RateCell {
  std::int64_t omega = 0;
  double mean_excess_mse = std::numeric_limits<double>::quiet_NaN();
};

struct RateSlopeRow {
  int intrinsic_dim = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  std::vector<RateCell> cells;  // one per omega grid point, in grid order
};

// One row per intrinsic dimension, in input order. Training failures
// propagate with the failing (d, omega, replication) cell named in the
// message. The trainer is injectable for tests; the default trains fresh
// towers per RateProbeConfig::t2rec.
std::vector<RateSlopeRow> empirical_rate_experiment(const RateProbeConfig& cfg,
                                                    const harness::T2RecTrainer& trainer = {});

}  // namespace ttrec::theory
