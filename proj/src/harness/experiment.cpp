// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <utility>

#include "ttrec/baselines/cocluster.hpp"
#include "ttrec/baselines/mf.hpp"
#include "ttrec/baselines/svdpp.hpp"
#include "ttrec/error.hpp"
#include "ttrec/rng.hpp"
#include "ttrec/twotower/model.hpp"

namespace ttrec::harness {

namespace {

// Shuffled index vector 0..n-1 under the given derived stream.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed,
                                          std::uint64_t stream) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, stream));
  rng.shuffle(order);
  return order;
}

// Splits `order` at `head_count`, sorting both halves so the resulting
// subsets keep the original rating order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> cut_sorted(
    const std::vector<std::size_t>& order, std::size_t head_count) {
  std::vector<std::size_t> head(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(head_count));
  std::vector<std::size_t> tail(order.begin() + static_cast<std::ptrdiff_t>(head_count), order.end());
  std::sort(head.begin(), head.end());
  std::sort(tail.begin(), tail.end());
  return {std::move(head), std::move(tail)};
}

}  // namespace

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(25);
  for (int k = 0; k < 25; ++k) grid[static_cast<std::size_t>(k)] = std::pow(10.0, -6.0 + k / 3.0);
  return grid;
}

std::vector<int> default_k_grid() {
  std::vector<int> grid(10);
  for (int i = 0; i < 10; ++i) grid[static_cast<std::size_t>(i)] = 5 * (i + 1);
  return grid;
}

SplitResult split(const data::ObservationSet& data, double ratio, std::uint64_t seed) {
  data::validate(data);
  require(ratio > 0.0 && ratio < 1.0, Errc::invalid_argument,
          "split: ratio must lie strictly between 0 and 1");
  const std::size_t n = data.ratings.size();
  const auto train_count =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  require(train_count > 0 && train_count < n, Errc::invalid_argument,
          "split: a side would be empty at this ratio");
  const auto order = shuffled_indices(n, seed, kStreamSplit);
  auto [train_idx, test_idx] = cut_sorted(order, train_count);
  return {data::subset(data, train_idx), data::subset(data, test_idx)};
}

void validate(const T2RecSettings& settings) {
  require(settings.embed_dim > 0, Errc::config_invalid,
          "t2rec settings: embed_dim must be positive");
  for (int w : settings.hidden)
    require(w > 0, Errc::config_invalid, "t2rec settings: hidden widths must be positive");
  require(settings.val_fraction > 0.0 && settings.val_fraction < 1.0, Errc::config_invalid,
          "t2rec settings: val_fraction must lie strictly between 0 and 1");
  twotower::validate(settings.train);
}

T2RecTuneResult tune_t2rec(const data::ObservationSet& train_set, const std::vector<double>& grid,
                           const T2RecSettings& settings, const T2RecTrainer& trainer) {
  validate(settings);
  require(!grid.empty(), Errc::invalid_argument, "tune_t2rec: empty lambda grid");
  data::validate(train_set);

  const std::size_t n = train_set.ratings.size();
  const auto val_count =
      static_cast<std::size_t>(std::floor(settings.val_fraction * static_cast<double>(n)));
  require(val_count > 0 && val_count < n, Errc::invalid_argument,
          "tune_t2rec: validation carve would leave an empty side");
  const auto order = shuffled_indices(n, settings.seed, kStreamValCarve);
  auto [val_idx, fit_idx] = cut_sorted(order, val_count);
  const data::ObservationSet val_set = data::subset(train_set, val_idx);
  const data::ObservationSet fit_set = data::subset(train_set, fit_idx);

  T2RecTrainer run = trainer;
  twotower::TwoTowerModel init;
  if (!run) {
    require(train_set.user_covariates && train_set.item_covariates, Errc::invalid_argument,
            "tune_t2rec: training data carries no covariate tables");
    // One init shared by every grid point, so runs differ only in lambda.
    init = twotower::make_towers(train_set.user_covariates->dim(),
                                 train_set.item_covariates->dim(), settings.embed_dim,
                                 settings.hidden, settings.activation, settings.seed);
    run = [&init, &settings](const data::ObservationSet& fit, const data::ObservationSet& val,
                             double lambda) {
      twotower::TrainConfig cfg = settings.train;
      cfg.lambda = lambda;
      cfg.seed = settings.seed;
      return twotower::train(init, fit, val, cfg);
    };
  }

  T2RecTuneResult out;
  out.val_rmse_by_lambda.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  double best_val = 0.0;
  bool any = false;
  std::string first_error;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    twotower::TrainResult result;
    try {
      result = run(fit_set, val_set, grid[g]);
    } catch (const std::exception& e) {
      if (first_error.empty()) first_error = e.what();
      continue;
    }
    const double val_rmse =
        result.history[static_cast<std::size_t>(result.best_epoch)].val_rmse;
    out.val_rmse_by_lambda[g] = val_rmse;
    if (!any || val_rmse < best_val ||
        (val_rmse == best_val && grid[g] < out.best_lambda)) {
      out.best_lambda = grid[g];
      out.train_result = std::move(result);
      best_val = val_rmse;
      any = true;
    }
  }
  require(any, Errc::training_failure,
          "tune_t2rec: every grid point failed to train; first error: " + first_error);
  return out;
}

double tune_baseline_cv(const data::ObservationSet& train_set, const CvScorer& scorer,
                        const std::vector<double>& grid, int folds, std::uint64_t seed) {
  require(static_cast<bool>(scorer), Errc::invalid_argument, "tune_baseline_cv: empty scorer");
  require(!grid.empty(), Errc::invalid_argument, "tune_baseline_cv: empty grid");
  require(folds >= 2, Errc::invalid_argument, "tune_baseline_cv: folds must be at least 2");
  data::validate(train_set);
  const std::size_t n = train_set.ratings.size();
  require(n >= static_cast<std::size_t>(folds), Errc::invalid_argument,
          "tune_baseline_cv: a fold would hold no ratings");

  const auto order = shuffled_indices(n, seed, kStreamCvFolds);
  std::vector<data::ObservationSet> fit_sets;
  std::vector<data::ObservationSet> holdouts;
  fit_sets.reserve(static_cast<std::size_t>(folds));
  holdouts.reserve(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
    const std::size_t hi = n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(folds);
    std::vector<std::size_t> hold_idx(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                      order.begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<std::size_t> fit_idx;
    fit_idx.reserve(n - (hi - lo));
    fit_idx.insert(fit_idx.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
    fit_idx.insert(fit_idx.end(), order.begin() + static_cast<std::ptrdiff_t>(hi), order.end());
    std::sort(hold_idx.begin(), hold_idx.end());
    std::sort(fit_idx.begin(), fit_idx.end());
    holdouts.push_back(data::subset(train_set, hold_idx));
    fit_sets.push_back(data::subset(train_set, fit_idx));
  }

  double best_value = 0.0;
  double best_score = 0.0;
  bool have_best = false;
  for (double value : grid) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f)
      total += scorer(fit_sets[static_cast<std::size_t>(f)],
                      holdouts[static_cast<std::size_t>(f)], value);
    const double mean = total / folds;
    if (!have_best || mean < best_score || (mean == best_score && value < best_value)) {
      best_value = value;
      best_score = mean;
      have_best = true;
    }
  }
  return best_value;
}

double evaluate_rmse(const Predictor& predictor, const data::ObservationSet& test_set) {
  require(static_cast<bool>(predictor), Errc::invalid_argument, "evaluate_rmse: empty predictor");
  require(!test_set.ratings.empty(), Errc::invalid_argument, "evaluate_rmse: empty test set");
  double sse = 0.0;
  for (const auto& r : test_set.ratings) {
    const double err = predictor(r.user, r.item) - r.value;
    sse += err * err;
  }
  return std::sqrt(sse / static_cast<double>(test_set.ratings.size()));
}

double evaluate_t2rec_rmse(const twotower::TwoTowerModel& model,
                           const data::ObservationSet& test_set) {
  require(test_set.user_covariates && test_set.item_covariates, Errc::invalid_argument,
          "evaluate_t2rec_rmse: test data carries no covariate tables");
  const auto& users = *test_set.user_covariates;
  const auto& items = *test_set.item_covariates;
  return evaluate_rmse(
      [&](std::int64_t user, std::int64_t item) {
        const Eigen::VectorXd xu = users.rows().row(users.row_index(user));
        const Eigen::VectorXd xi = items.rows().row(items.row_index(item));
        return twotower::score(model, xu, xi);
      },
      test_set);
}

const char* method_name(Method m) {
  switch (m) {
    case Method::t2rec: return "t2rec";
    case Method::rsvd: return "rsvd";
    case Method::svdpp: return "svdpp";
    case Method::cocluster: return "cocluster";
    case Method::knn: return "knn";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (name == method_name(m)) return m;
  fail(Errc::config_invalid, "unknown method name: " + std::string(name));
}

void validate(const BaselineSettings& settings) {
  require(settings.mf_rank > 0 && settings.svdpp_rank > 0, Errc::config_invalid,
          "baseline settings: factor ranks must be positive");
  require(settings.mf_sweeps > 0 && settings.svdpp_epochs > 0 && settings.cocluster_iters > 0,
          Errc::config_invalid, "baseline settings: iteration counts must be positive");
  require(settings.svdpp_lr > 0.0, Errc::config_invalid,
          "baseline settings: svdpp_lr must be positive");
  require(settings.svdpp_reg >= 0.0 && settings.svdpp_init_std >= 0.0, Errc::config_invalid,
          "baseline settings: svdpp_reg and svdpp_init_std must be non-negative");
  require(settings.cocluster_user_clusters > 0 && settings.cocluster_item_clusters > 0,
          Errc::config_invalid, "baseline settings: cluster counts must be positive");
  require(settings.cv_folds >= 2, Errc::config_invalid,
          "baseline settings: cv_folds must be at least 2");
}

void validate(const ExperimentConfig& cfg) {
  require(!cfg.methods.empty(), Errc::config_invalid, "experiment config: no methods requested");
  require(cfg.replications >= 1, Errc::config_invalid,
          "experiment config: replications must be at least 1");
  require(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0, Errc::config_invalid,
          "experiment config: split_ratio must lie strictly between 0 and 1");
  require(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0, Errc::config_invalid,
          "experiment config: val_fraction must lie strictly between 0 and 1");
  require(!cfg.lambda_grid.empty(), Errc::config_invalid, "experiment config: empty lambda_grid");
  require(!cfg.k_grid.empty(), Errc::config_invalid, "experiment config: empty k_grid");
  for (int k : cfg.k_grid)
    require(k > 0, Errc::config_invalid, "experiment config: k_grid values must be positive");
  for (double l : cfg.lambda_grid)
    require(l >= 0.0 && std::isfinite(l), Errc::config_invalid,
            "experiment config: lambda_grid values must be finite and non-negative");
  validate(cfg.t2rec);
  validate(cfg.baselines);
}

namespace {

// Tune (where the method has a searched hyperparameter), fit on the full
// train side, and score on the test side. Everything derives from rep_seed.
double run_method(Method method, const ExperimentConfig& cfg, const SplitResult& parts,
                  std::uint64_t rep_seed) {
  const data::ObservationSet& train_set = parts.train;
  const data::ObservationSet& test_set = parts.test;
  const BaselineSettings& bs = cfg.baselines;
  switch (method) {
    case Method::t2rec: {
      T2RecSettings settings = cfg.t2rec;
      settings.val_fraction = cfg.val_fraction;
      settings.seed = rep_seed;
      const T2RecTuneResult tuned = tune_t2rec(train_set, cfg.lambda_grid, settings);
      return evaluate_t2rec_rmse(tuned.train_result.model, test_set);
    }
    case Method::rsvd: {
      const CvScorer scorer = [&](const data::ObservationSet& fit_set,
                                  const data::ObservationSet& holdout, double reg) {
        const baselines::MfModel model =
            baselines::fit_rsvd(fit_set, bs.mf_rank, reg, bs.mf_sweeps, rep_seed);
        return evaluate_rmse(
            [&](std::int64_t u, std::int64_t i) { return baselines::predict_mf(model, u, i); },
            holdout);
      };
      const double best_reg =
          tune_baseline_cv(train_set, scorer, cfg.lambda_grid, bs.cv_folds, rep_seed);
      const baselines::MfModel model =
          baselines::fit_rsvd(train_set, bs.mf_rank, best_reg, bs.mf_sweeps, rep_seed);
      return evaluate_rmse(
          [&](std::int64_t u, std::int64_t i) { return baselines::predict_mf(model, u, i); },
          test_set);
    }
    case Method::svdpp: {
      const baselines::SvdPpModel model =
          baselines::fit_svdpp(train_set, bs.svdpp_rank, bs.svdpp_reg, bs.svdpp_lr,
                               bs.svdpp_epochs, bs.svdpp_init_std, rep_seed);
      return evaluate_rmse(
          [&](std::int64_t u, std::int64_t i) { return baselines::predict_svdpp(model, u, i); },
          test_set);
    }
    case Method::cocluster: {
      const baselines::CoClusterModel model =
          baselines::fit_cocluster(train_set, bs.cocluster_user_clusters,
                                   bs.cocluster_item_clusters, bs.cocluster_iters, rep_seed);
      return evaluate_rmse(
          [&](std::int64_t u, std::int64_t i) { return baselines::predict_cocluster(model, u, i); },
          test_set);
    }
    case Method::knn: {
      std::vector<double> grid;
      grid.reserve(cfg.k_grid.size());
      for (int k : cfg.k_grid) grid.push_back(static_cast<double>(k));
      const CvScorer scorer = [&](const data::ObservationSet& fit_set,
                                  const data::ObservationSet& holdout, double value) {
        const baselines::KnnModel model =
            baselines::fit_knn(fit_set, bs.knn_mode, static_cast<int>(std::llround(value)));
        return evaluate_rmse(
            [&](std::int64_t u, std::int64_t i) { return baselines::predict_knn(model, u, i).value; },
            holdout);
      };
      const double best_k = tune_baseline_cv(train_set, scorer, grid, bs.cv_folds, rep_seed);
      const baselines::KnnModel model =
          baselines::fit_knn(train_set, bs.knn_mode, static_cast<int>(std::llround(best_k)));
      return evaluate_rmse(
          [&](std::int64_t u, std::int64_t i) { return baselines::predict_knn(model, u, i).value; },
          test_set);
    }
  }
  fail(Errc::internal, "run_method: unhandled method");
}

}  // namespace

ResultTable run_scenario(const ExperimentConfig& cfg, const Scenario& scenario) {
  validate(cfg);
  require(scenario.n_users > 0 && scenario.n_items > 0 && scenario.intrinsic_dim > 0,
          Errc::invalid_argument, "run_scenario: scenario dimensions must be positive");

  const std::size_t n_methods = cfg.methods.size();
  std::vector<std::vector<double>> values(n_methods);
  std::vector<int> failures(n_methods, 0);
  std::vector<std::string> first_error(n_methods);

  const auto record_failure = [&](std::size_t mi, int rep, const std::string& what) {
    ++failures[mi];
    if (first_error[mi].empty())
      first_error[mi] = "replication " + std::to_string(rep) + ": " + what;
  };

  for (int rep = 0; rep < cfg.replications; ++rep) {
    const std::uint64_t rep_seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
    synth::SyntheticSpec spec = cfg.spec;
    spec.n_users = scenario.n_users;
    spec.n_items = scenario.n_items;
    spec.intrinsic_dim = scenario.intrinsic_dim;
    spec.seed = rep_seed;

    SplitResult parts;
    try {
      const synth::SyntheticData data = synth::generate_dataset(spec);
      parts = split(data.observations, cfg.split_ratio, rep_seed);
    } catch (const std::exception& e) {
      for (std::size_t mi = 0; mi < n_methods; ++mi) record_failure(mi, rep, e.what());
      continue;
    }

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      try {
        values[mi].push_back(run_method(cfg.methods[mi], cfg, parts, rep_seed));
      } catch (const std::exception& e) {
        record_failure(mi, rep, e.what());
      }
    }
  }

  ResultTable rows;
  rows.reserve(n_methods);
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    ResultRow row;
    row.scenario_n = scenario.n_users;
    row.scenario_m = scenario.n_items;
    row.intrinsic_dim = scenario.intrinsic_dim;
    row.method = cfg.methods[mi];
    row.replications = static_cast<int>(values[mi].size());
    row.failures = failures[mi];
    row.error = first_error[mi];
    if (!values[mi].empty()) {
      const auto count = static_cast<double>(values[mi].size());
      const double mean =
          std::accumulate(values[mi].begin(), values[mi].end(), 0.0) / count;
      row.rmse_mean = mean;
      if (values[mi].size() >= 2) {
        double ss = 0.0;
        for (double v : values[mi]) ss += (v - mean) * (v - mean);
        row.rmse_se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
      } else {
        row.rmse_se = 0.0;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ResultTable run_sweep(const ExperimentConfig& cfg, const std::vector<Scenario>& scenarios) {
  require(!scenarios.empty(), Errc::invalid_argument, "run_sweep: no scenarios requested");
  ResultTable all;
  for (const Scenario& sc : scenarios) {
    ResultTable rows = run_scenario(cfg, sc);
    all.insert(all.end(), std::make_move_iterator(rows.begin()),
               std::make_move_iterator(rows.end()));
  }
  return all;
}

std::string result_csv(const ResultTable& rows) {
  std::string out = "scenario_n,scenario_m,d,method,rmse_mean,rmse_se,replications\n";
  char buf[256];
  for (const ResultRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%d,%s,%.17g,%.17g,%d\n",
                  static_cast<long long>(row.scenario_n), static_cast<long long>(row.scenario_m),
                  row.intrinsic_dim, method_name(row.method), row.rmse_mean, row.rmse_se,
                  row.replications);
    out += buf;
  }
  return out;
}

std::string result_text(const ResultTable& rows) {
  // Scenario keys in first-appearance order; method columns in canonical order.
  std::vector<Scenario> keys;
  const auto key_pos = [&](const ResultRow& row) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i].n_users == row.scenario_n && keys[i].n_items == row.scenario_m &&
          keys[i].intrinsic_dim == row.intrinsic_dim)
        return i;
    keys.push_back({row.scenario_n, row.scenario_m, row.intrinsic_dim});
    return keys.size() - 1;
  };
  std::vector<Method> columns;
  for (Method m : kAllMethods)
    for (const ResultRow& row : rows)
      if (row.method == m) {
        columns.push_back(m);
        break;
      }
  // cells[scenario][column] as preformatted strings.
  std::vector<std::vector<std::string>> cells;
  for (const ResultRow& row : rows) {
    const std::size_t si = key_pos(row);
    if (cells.size() <= si) cells.resize(si + 1, std::vector<std::string>(columns.size()));
    std::size_t ci = 0;
    while (ci < columns.size() && columns[ci] != row.method) ++ci;
    char buf[64];
    if (row.replications > 0)
      std::snprintf(buf, sizeof(buf), "%.4f (%.4f)", row.rmse_mean, row.rmse_se);
    else
      std::snprintf(buf, sizeof(buf), "failed");
    cells[si][ci] = buf;
  }

  std::ostringstream out;
  constexpr int kScenarioWidth = 16;
  constexpr int kDimWidth = 5;
  constexpr int kCellWidth = 18;
  out << std::string("(n, m)").append(kScenarioWidth - 6, ' ');
  out << std::string("d").append(kDimWidth - 1, ' ');
  for (Method m : columns) {
    std::string name = method_name(m);
    name.append(static_cast<std::size_t>(kCellWidth) - name.size(), ' ');
    out << name;
  }
  out << '\n';
  for (std::size_t si = 0; si < keys.size(); ++si) {
    std::string scenario = "(" + std::to_string(keys[si].n_users) + ", " +
                           std::to_string(keys[si].n_items) + ")";
    scenario.append(static_cast<std::size_t>(kScenarioWidth) - scenario.size(), ' ');
    std::string dim = std::to_string(keys[si].intrinsic_dim);
    dim.append(static_cast<std::size_t>(kDimWidth) - dim.size(), ' ');
    out << scenario << dim;
    for (std::size_t ci = 0; ci < columns.size(); ++ci) {
      std::string cell = cells[si][ci].empty() ? "missing" : cells[si][ci];
      if (cell.size() < static_cast<std::size_t>(kCellWidth))
        cell.append(static_cast<std::size_t>(kCellWidth) - cell.size(), ' ');
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ttrec::harness
