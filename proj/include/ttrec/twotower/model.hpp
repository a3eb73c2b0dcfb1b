// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Two-tower scorer: the predicted rating is the inner product of a user
// network applied to user covariates and an item network applied to item
// covariates. The training objective is mean squared residual plus
// lambda times the squared-parameter penalty, and the gradient kernel
// computes the exact gradient of that objective over a minibatch.
//
// The minibatch kernel splits the batch into fixed-size chunks, runs each
// chunk through batched (GEMM) tower passes, and combines chunk gradients in
// chunk order. Chunks may execute on OpenMP threads; because chunk boundaries
// and the combine order never depend on the thread count, results are
// bit-identical from one thread to many. A scalar per-pair reference kernel
// lives in the serial namespace as the independent oracle.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ttrec/data/observations.hpp"
#include "ttrec/nn/mlp.hpp"

namespace ttrec::twotower {

struct TwoTowerModel {
  nn::Mlp user_tower;
  nn::Mlp item_tower;
};

// Both towers valid and agreeing on the embedding dimension.
void validate(const TwoTowerModel& model);

// Fresh towers with Glorot-uniform weights: dims are
// {input_dim, hidden..., embed_dim} per side. Seed streams 11 and 12.
TwoTowerModel make_towers(int user_dim, int item_dim, int embed_dim,
                          const std::vector<int>& hidden, nn::Activation act,
                          std::uint64_t seed);

inline constexpr std::uint64_t kStreamUserTower = 11;
inline constexpr std::uint64_t kStreamItemTower = 12;

double score(const TwoTowerModel& model, const Eigen::VectorXd& user_x,
             const Eigen::VectorXd& item_x);

// Sum of squared Frobenius norms of all weight matrices plus squared l2 norms
// of all biases, over both towers.
double penalty(const TwoTowerModel& model);

// Aligned minibatch: row b of each matrix belongs to the b-th pair.
struct PairBatch {
  Eigen::MatrixXd user_inputs;
  Eigen::MatrixXd item_inputs;
  Eigen::VectorXd targets;

  Eigen::Index size() const { return targets.size(); }
};

PairBatch gather_batch(const data::ObservationSet& obs, const std::vector<std::size_t>& indices);
PairBatch gather_all(const data::ObservationSet& obs);

Eigen::VectorXd score_batch(const TwoTowerModel& model, const PairBatch& batch);

// Mean squared residual + lambda * penalty. Rejects empty batches.
double objective_batch(const TwoTowerModel& model, const PairBatch& batch, double lambda);
double objective(const TwoTowerModel& model, const data::ObservationSet& obs, double lambda);

double rmse_batch(const TwoTowerModel& model, const PairBatch& batch);
double rmse(const TwoTowerModel& model, const data::ObservationSet& obs);

struct ModelGrad {
  nn::MlpGrad user;
  nn::MlpGrad item;
};

struct BatchGradient {
  ModelGrad grad;
  double mse = 0.0;  // mean squared residual at the evaluation point
};

// Exact gradient of objective_batch with respect to every tower parameter.
BatchGradient objective_gradient(const TwoTowerModel& model, const PairBatch& batch,
                                 double lambda);

// params += step * grad, both towers.
void apply_step(TwoTowerModel& model, const ModelGrad& grad, double step);

// One SGD step: params -= lr * (exact minibatch objective gradient).
void sgd_step(TwoTowerModel& model, const PairBatch& batch, double lr, double lambda);

namespace serial {
// Per-pair scalar reference of objective_gradient: plain loops, no chunking,
// no OpenMP. Used by tests and the benchmark tool.
BatchGradient objective_gradient(const TwoTowerModel& model, const PairBatch& batch,
                                 double lambda);
}  // namespace serial

}  // namespace ttrec::twotower
