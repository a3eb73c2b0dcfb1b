// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Minibatch SGD with a decayed-and-floored learning rate, per-epoch
// validation, and best-epoch early stopping. History row 0 records the
// untrained model (lr 0); training epochs are rows 1..N, epoch e using
// lr = max(lr_init * decay^(e-1), lr_min). The returned model is the row with
// minimal validation RMSE, earliest epoch winning ties, so the initial model
// is always a candidate.

#pragma once

#include <cstdint>
#include <vector>

#include "ttrec/data/observations.hpp"
#include "ttrec/twotower/model.hpp"

namespace ttrec::twotower {

struct TrainConfig {
  double lambda = 0.0;
  double lr_init = 1e-2;
  double lr_decay = 0.9;
  double lr_min = 5e-3;
  int batch_size = 128;
  int max_epochs = 300;
  int patience = 10;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

struct EpochRow {
  int epoch = 0;
  // Average over the epoch's minibatches of the minibatch objective (squared
  // residual mean plus lambda * penalty, both at the then-current
  // parameters). Row 0 holds the full-train objective of the initial model.
  double train_objective = 0.0;
  double val_rmse = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  TwoTowerModel model;             // parameters of the best validation epoch
  std::vector<EpochRow> history;   // row 0 = init, then one row per epoch
  int best_epoch = 0;
};

// Minibatches are consecutive slices of a fresh seeded shuffle each epoch
// (sampling without replacement); a final short batch is included. Throws
// Errc::training_failure if the objective or parameters leave the finite
// range. Deterministic in cfg.seed for any thread count.
TrainResult train(const TwoTowerModel& init, const data::ObservationSet& train_set,
                  const data::ObservationSet& val_set, const TrainConfig& cfg);

}  // namespace ttrec::twotower
