// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: train/test splits, hyperparameter grids,
// validation-set tuning for the two-tower model, cross-validated tuning for
// the baselines, replicated scenario runs, and RMSE/SE result tables.
//
// Every replication r of a scenario depends only on base_seed + r: the
// generator, the split, the validation carve, and every fitter derive their
// streams from that one value, so replications are independent cells that may
// run in any order (or concurrently) without changing the aggregate.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ttrec/baselines/knn.hpp"
#include "ttrec/data/observations.hpp"
#include "ttrec/nn/activations.hpp"
#include "ttrec/synth/generator.hpp"
#include "ttrec/twotower/train.hpp"

namespace ttrec::harness {

// Subordinate seed streams (derive_seed(seed, stream)).
inline constexpr std::uint64_t kStreamSplit = 41;
inline constexpr std::uint64_t kStreamValCarve = 42;
inline constexpr std::uint64_t kStreamCvFolds = 43;

// Regularization grid 10^(-6 + k/3) for k = 0..24 (endpoints 1e-6 and 1e+2),
// shared by the two-tower model and regularized SVD.
std::vector<double> default_lambda_grid();

// Neighborhood-size grid {5, 10, ..., 50}.
std::vector<int> default_k_grid();

struct SplitResult {
  data::ObservationSet train;
  data::ObservationSet test;
};

// Uniformly random rating-level partition; `ratio` is the train fraction and
// the train side gets floor(ratio * n) ratings. Covariate tables are shared
// with the input. Throws if either side would be empty.
SplitResult split(const data::ObservationSet& data, double ratio, std::uint64_t seed);

// Architecture and protocol for one two-tower training run. The defaults are
// the experiment reference setup: five fully-connected layers per tower
// (four hidden layers of 50 ReLU neurons, 30 output neurons).
struct T2RecSettings {
  std::vector<int> hidden{50, 50, 50, 50};
  int embed_dim = 30;
  nn::Activation activation = nn::Activation::relu;
  twotower::TrainConfig train;  // lambda and seed are overridden during tuning
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

void validate(const T2RecSettings& settings);

// Trains on (fit_set, val_set) at one regularization value. Injectable so
// tests can substitute a stub; the default builds fresh towers from
// T2RecSettings and runs twotower::train.
using T2RecTrainer = std::function<twotower::TrainResult(
    const data::ObservationSet& fit_set, const data::ObservationSet& val_set, double lambda)>;

struct T2RecTuneResult {
  double best_lambda = 0.0;
  twotower::TrainResult train_result;      // the run at best_lambda; no retrain
  std::vector<double> val_rmse_by_lambda;  // aligned with the grid; NaN = failed
};

// Carves floor(val_fraction * n) ratings out of `train_set` as a validation
// set, trains one model per grid value on the remainder, and returns the
// value with minimal best-epoch validation RMSE (ties broken toward the
// smaller lambda). Grid points whose training throws are recorded as NaN and
// skipped; if every point fails the whole tune throws.
T2RecTuneResult tune_t2rec(const data::ObservationSet& train_set, const std::vector<double>& grid,
                           const T2RecSettings& settings, const T2RecTrainer& trainer = {});

// Fits on `fit_set` at one hyperparameter value and returns the holdout RMSE.
using CvScorer = std::function<double(const data::ObservationSet& fit_set,
                                      const data::ObservationSet& holdout, double value)>;

// Rating-level k-fold cross-validation: folds are near-equal slices of one
// seeded shuffle. Returns the grid value with minimal mean held-out RMSE,
// ties broken toward the smaller value. Requires folds >= 2 and at least one
// rating per fold.
double tune_baseline_cv(const data::ObservationSet& train_set, const CvScorer& scorer,
                        const std::vector<double>& grid, int folds, std::uint64_t seed);

using Predictor = std::function<double(std::int64_t user, std::int64_t item)>;

// sqrt(mean squared prediction error) over the test ratings.
double evaluate_rmse(const Predictor& predictor, const data::ObservationSet& test_set);

// evaluate_rmse with predictions from the towers applied to the covariate
// rows stored in `test_set`.
double evaluate_t2rec_rmse(const twotower::TwoTowerModel& model,
                           const data::ObservationSet& test_set);

enum class Method { t2rec, rsvd, svdpp, cocluster, knn };

inline constexpr std::array<Method, 5> kAllMethods = {
    Method::t2rec, Method::rsvd, Method::svdpp, Method::cocluster, Method::knn};

const char* method_name(Method m);
Method parse_method(std::string_view name);  // throws Errc::config_invalid

// Fixed baseline hyperparameters (those not grid-searched) plus the
// cross-validation fold count. Values follow common library defaults; the
// factor ranks match the two-tower embedding dimension.
struct BaselineSettings {
  int mf_rank = 30;
  int mf_sweeps = 30;
  int svdpp_rank = 30;
  int svdpp_epochs = 20;
  double svdpp_lr = 5e-3;
  double svdpp_reg = 2e-2;
  double svdpp_init_std = 0.1;
  int cocluster_user_clusters = 3;
  int cocluster_item_clusters = 3;
  int cocluster_iters = 20;
  baselines::KnnMode knn_mode = baselines::KnnMode::user_based;
  int cv_folds = 5;
};

void validate(const BaselineSettings& settings);

struct ExperimentConfig {
  synth::SyntheticSpec spec;  // n_users/n_items/intrinsic_dim/seed set per cell
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  int replications = 10;
  double split_ratio = 0.7;
  double val_fraction = 0.2;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<int> k_grid = default_k_grid();
  std::uint64_t base_seed = 0;
  T2RecSettings t2rec;
  BaselineSettings baselines;
};

void validate(const ExperimentConfig& cfg);

// One Table-1 cell address: matrix size and intrinsic covariate dimension.
struct Scenario {
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  int intrinsic_dim = 0;
};

struct ResultRow {
  std::int64_t scenario_n = 0;
  std::int64_t scenario_m = 0;
  int intrinsic_dim = 0;
  Method method = Method::t2rec;
  double rmse_mean = std::numeric_limits<double>::quiet_NaN();
  double rmse_se = std::numeric_limits<double>::quiet_NaN();
  int replications = 0;  // replications that succeeded and were aggregated
  int failures = 0;      // replications that errored for this method
  std::string error;     // first failure message, empty when none
};

using ResultTable = std::vector<ResultRow>;

// Runs cfg.replications independent replications of one scenario: generate,
// split, tune, fit, evaluate, for every requested method. Replication r uses
// seed base_seed + r. A failing method records the error and the run
// continues; rows with zero successes carry NaN statistics. SE is the sample
// standard deviation across replications divided by sqrt(#successes).
ResultTable run_scenario(const ExperimentConfig& cfg, const Scenario& scenario);

// run_scenario over several scenarios, rows concatenated in input order.
ResultTable run_sweep(const ExperimentConfig& cfg, const std::vector<Scenario>& scenarios);

// CSV with header scenario_n,scenario_m,d,method,rmse_mean,rmse_se,replications.
std::string result_csv(const ResultTable& rows);

// Fixed-width text table: one row per (scenario, d), one column per method,
// cells as "mean (se)".
std::string result_text(const ResultTable& rows);

}  // namespace ttrec::harness
