// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/twotower/train.hpp"

#include <cmath>
#include <string>

#include "ttrec/error.hpp"
#include "ttrec/rng.hpp"

namespace ttrec::twotower {

void validate(const TrainConfig& cfg) {
  require(cfg.lambda >= 0.0, Errc::config_invalid, "lambda must be non-negative");
  require(cfg.lr_init > 0.0, Errc::config_invalid, "lr_init must be positive");
  require(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0, Errc::config_invalid,
          "lr_decay must lie in (0, 1]");
  require(cfg.lr_min >= 0.0, Errc::config_invalid, "lr_min must be non-negative");
  require(cfg.batch_size >= 1, Errc::config_invalid, "batch_size must be at least 1");
  require(cfg.max_epochs >= 1, Errc::config_invalid, "max_epochs must be at least 1");
  require(cfg.patience >= 1, Errc::config_invalid, "patience must be at least 1");
}

TrainResult train(const TwoTowerModel& init, const data::ObservationSet& train_set,
                  const data::ObservationSet& val_set, const TrainConfig& cfg) {
  validate(cfg);
  validate(init);
  require(!train_set.ratings.empty(), Errc::invalid_argument, "empty training set");
  require(!val_set.ratings.empty(), Errc::invalid_argument, "empty validation set");

  const PairBatch val_batch = gather_all(val_set);
  const PairBatch train_full = gather_all(train_set);

  TrainResult result;
  result.model = init;
  TwoTowerModel current = init;

  EpochRow row0;
  row0.epoch = 0;
  row0.train_objective = objective_batch(current, train_full, cfg.lambda);
  row0.val_rmse = rmse_batch(current, val_batch);
  row0.lr = 0.0;
  result.history.push_back(row0);
  result.best_epoch = 0;
  double best_val = row0.val_rmse;

  Rng shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(train_set.ratings.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;

  const auto n = static_cast<Eigen::Index>(order.size());
  const auto batch_size = static_cast<Eigen::Index>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double lr =
        std::max(cfg.lr_init * std::pow(cfg.lr_decay, epoch - 1), cfg.lr_min);
    shuffle_rng.shuffle(order);

    double objective_sum = 0.0;
    int n_batches = 0;
    for (Eigen::Index start = 0; start < n; start += batch_size) {
      const auto len = static_cast<std::size_t>(std::min(batch_size, n - start));
      std::vector<std::size_t> idx(order.begin() + start,
                                   order.begin() + start + static_cast<std::ptrdiff_t>(len));
      const PairBatch batch = gather_batch(train_set, idx);
      const BatchGradient g = objective_gradient(current, batch, cfg.lambda);
      objective_sum += g.mse + cfg.lambda * penalty(current);
      ++n_batches;
      apply_step(current, g.grad, -lr);
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_objective = objective_sum / n_batches;
    row.val_rmse = rmse_batch(current, val_batch);
    row.lr = lr;
    require(std::isfinite(row.train_objective) && std::isfinite(row.val_rmse),
            Errc::training_failure,
            "non-finite objective at epoch " + std::to_string(epoch) +
                " (diverged; reduce lr or increase lambda)");
    result.history.push_back(row);

    if (row.val_rmse < best_val) {
      best_val = row.val_rmse;
      result.best_epoch = epoch;
      result.model = current;
    }
    if (epoch - result.best_epoch >= cfg.patience) break;
  }
  return result;
}

}  // namespace ttrec::twotower
