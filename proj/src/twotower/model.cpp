// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/twotower/model.hpp"

#include <cmath>

#include "ttrec/error.hpp"
#include "ttrec/nn/reference.hpp"
#include "ttrec/parallel.hpp"

namespace ttrec::twotower {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
// Pairs per gradient chunk and rows per evaluation block. Fixed constants:
// changing them changes floating-point summation order, so they are part of
// the reproducibility contract.
constexpr Eigen::Index kGradChunk = 32;
constexpr Eigen::Index kEvalBlock = 4096;
}  // namespace

void validate(const TwoTowerModel& model) {
  nn::validate(model.user_tower);
  nn::validate(model.item_tower);
  require(model.user_tower.output_dim() == model.item_tower.output_dim(),
          Errc::dimension_mismatch,
          "towers disagree on embedding dimension: " +
              std::to_string(model.user_tower.output_dim()) + " vs " +
              std::to_string(model.item_tower.output_dim()));
}

TwoTowerModel make_towers(int user_dim, int item_dim, int embed_dim,
                          const std::vector<int>& hidden, nn::Activation act,
                          std::uint64_t seed) {
  std::vector<int> user_dims{user_dim};
  user_dims.insert(user_dims.end(), hidden.begin(), hidden.end());
  user_dims.push_back(embed_dim);
  std::vector<int> item_dims{item_dim};
  item_dims.insert(item_dims.end(), hidden.begin(), hidden.end());
  item_dims.push_back(embed_dim);

  Rng user_rng(derive_seed(seed, kStreamUserTower));
  Rng item_rng(derive_seed(seed, kStreamItemTower));
  TwoTowerModel model{nn::glorot_init(user_dims, act, user_rng),
                      nn::glorot_init(item_dims, act, item_rng)};
  validate(model);
  return model;
}

double score(const TwoTowerModel& model, const VectorXd& user_x, const VectorXd& item_x) {
  return nn::forward(model.user_tower, user_x).dot(nn::forward(model.item_tower, item_x));
}

double penalty(const TwoTowerModel& model) {
  double acc = 0.0;
  for (const auto* tower : {&model.user_tower, &model.item_tower})
    for (const auto& lay : tower->layers)
      acc += lay.weights.squaredNorm() + lay.bias.squaredNorm();
  return acc;
}

PairBatch gather_batch(const data::ObservationSet& obs, const std::vector<std::size_t>& indices) {
  require(obs.user_covariates && obs.item_covariates, Errc::config_invalid,
          "observation set has no covariate tables");
  PairBatch batch;
  const auto n = static_cast<Eigen::Index>(indices.size());
  batch.user_inputs.resize(n, obs.user_covariates->dim());
  batch.item_inputs.resize(n, obs.item_covariates->dim());
  batch.targets.resize(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& r = obs.ratings.at(indices[static_cast<std::size_t>(b)]);
    batch.user_inputs.row(b) = obs.user_covariates->rows().row(
        obs.user_covariates->row_index(r.user));
    batch.item_inputs.row(b) = obs.item_covariates->rows().row(
        obs.item_covariates->row_index(r.item));
    batch.targets[b] = r.value;
  }
  return batch;
}

PairBatch gather_all(const data::ObservationSet& obs) {
  std::vector<std::size_t> idx(obs.ratings.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  return gather_batch(obs, idx);
}

VectorXd score_batch(const TwoTowerModel& model, const PairBatch& batch) {
  const Eigen::Index n = batch.size();
  VectorXd scores(n);
  for (Eigen::Index start = 0; start < n; start += kEvalBlock) {
    const Eigen::Index len = std::min(kEvalBlock, n - start);
    const MatrixXd eu = nn::forward_batch(model.user_tower, batch.user_inputs.middleRows(start, len));
    const MatrixXd ei = nn::forward_batch(model.item_tower, batch.item_inputs.middleRows(start, len));
    scores.segment(start, len) = eu.cwiseProduct(ei).rowwise().sum();
  }
  return scores;
}

double objective_batch(const TwoTowerModel& model, const PairBatch& batch, double lambda) {
  require(batch.size() > 0, Errc::invalid_argument, "objective needs a non-empty batch");
  const VectorXd resid = batch.targets - score_batch(model, batch);
  return resid.squaredNorm() / static_cast<double>(batch.size()) + lambda * penalty(model);
}

double objective(const TwoTowerModel& model, const data::ObservationSet& obs, double lambda) {
  require(!obs.ratings.empty(), Errc::invalid_argument, "objective needs a non-empty observation set");
  return objective_batch(model, gather_all(obs), lambda);
}

double rmse_batch(const TwoTowerModel& model, const PairBatch& batch) {
  require(batch.size() > 0, Errc::invalid_argument, "rmse needs a non-empty batch");
  const VectorXd resid = batch.targets - score_batch(model, batch);
  return std::sqrt(resid.squaredNorm() / static_cast<double>(batch.size()));
}

double rmse(const TwoTowerModel& model, const data::ObservationSet& obs) {
  require(!obs.ratings.empty(), Errc::invalid_argument, "rmse needs a non-empty observation set");
  return rmse_batch(model, gather_all(obs));
}

namespace {

struct ChunkResult {
  ModelGrad grad;
  double sq_resid = 0.0;
};

void add_penalty_gradient(const TwoTowerModel& model, double lambda, ModelGrad& grad) {
  if (lambda == 0.0) return;
  for (std::size_t l = 0; l < model.user_tower.layers.size(); ++l) {
    grad.user.weights[l].noalias() += 2.0 * lambda * model.user_tower.layers[l].weights;
    grad.user.bias[l].noalias() += 2.0 * lambda * model.user_tower.layers[l].bias;
  }
  for (std::size_t l = 0; l < model.item_tower.layers.size(); ++l) {
    grad.item.weights[l].noalias() += 2.0 * lambda * model.item_tower.layers[l].weights;
    grad.item.bias[l].noalias() += 2.0 * lambda * model.item_tower.layers[l].bias;
  }
}

}  // namespace

BatchGradient objective_gradient(const TwoTowerModel& model, const PairBatch& batch,
                                 double lambda) {
  require(batch.size() > 0, Errc::invalid_argument, "gradient needs a non-empty batch");
  const Eigen::Index n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto n_chunks = static_cast<std::int64_t>((n + kGradChunk - 1) / kGradChunk);

  std::vector<ChunkResult> chunks(static_cast<std::size_t>(n_chunks));
  parallel_for(n_chunks, [&](std::int64_t c) {
    const Eigen::Index start = static_cast<Eigen::Index>(c) * kGradChunk;
    const Eigen::Index len = std::min(kGradChunk, n - start);
    const MatrixXd Uc = batch.user_inputs.middleRows(start, len);
    const MatrixXd Ic = batch.item_inputs.middleRows(start, len);
    const MatrixXd eu = nn::forward_batch(model.user_tower, Uc);
    const MatrixXd ei = nn::forward_batch(model.item_tower, Ic);
    const VectorXd resid =
        batch.targets.segment(start, len) - eu.cwiseProduct(ei).rowwise().sum();

    // d/dtheta of (1/n) sum (k - s)^2 = (-2/n) sum resid * ds/dtheta, and
    // ds/d(tower output) is the other tower's embedding.
    const VectorXd coeff = (-2.0 * inv_n) * resid;
    const MatrixXd upstream_user = ei.array().colwise() * coeff.array();
    const MatrixXd upstream_item = eu.array().colwise() * coeff.array();

    auto& slot = chunks[static_cast<std::size_t>(c)];
    slot.grad.user = nn::backward_batch(model.user_tower, Uc, upstream_user);
    slot.grad.item = nn::backward_batch(model.item_tower, Ic, upstream_item);
    slot.sq_resid = resid.squaredNorm();
  });

  BatchGradient out;
  out.grad.user = nn::make_zero_grad(model.user_tower);
  out.grad.item = nn::make_zero_grad(model.item_tower);
  for (const auto& chunk : chunks) {  // fixed combine order
    out.grad.user.add_scaled(chunk.grad.user, 1.0);
    out.grad.item.add_scaled(chunk.grad.item, 1.0);
    out.mse += chunk.sq_resid;
  }
  out.mse *= inv_n;
  add_penalty_gradient(model, lambda, out.grad);
  return out;
}

void apply_step(TwoTowerModel& model, const ModelGrad& grad, double step) {
  for (std::size_t l = 0; l < model.user_tower.layers.size(); ++l) {
    model.user_tower.layers[l].weights.noalias() += step * grad.user.weights[l];
    model.user_tower.layers[l].bias.noalias() += step * grad.user.bias[l];
  }
  for (std::size_t l = 0; l < model.item_tower.layers.size(); ++l) {
    model.item_tower.layers[l].weights.noalias() += step * grad.item.weights[l];
    model.item_tower.layers[l].bias.noalias() += step * grad.item.bias[l];
  }
}

void sgd_step(TwoTowerModel& model, const PairBatch& batch, double lr, double lambda) {
  const BatchGradient g = objective_gradient(model, batch, lambda);
  apply_step(model, g.grad, -lr);
}

namespace serial {

BatchGradient objective_gradient(const TwoTowerModel& model, const PairBatch& batch,
                                 double lambda) {
  require(batch.size() > 0, Errc::invalid_argument, "gradient needs a non-empty batch");
  const Eigen::Index n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  BatchGradient out;
  out.grad.user = nn::make_zero_grad(model.user_tower);
  out.grad.item = nn::make_zero_grad(model.item_tower);

  const auto user_dim = static_cast<std::size_t>(batch.user_inputs.cols());
  const auto item_dim = static_cast<std::size_t>(batch.item_inputs.cols());
  const auto p = static_cast<std::size_t>(model.user_tower.output_dim());

  for (Eigen::Index b = 0; b < n; ++b) {
    std::vector<double> xu(user_dim), xi(item_dim);
    for (std::size_t j = 0; j < user_dim; ++j)
      xu[j] = batch.user_inputs(b, static_cast<Eigen::Index>(j));
    for (std::size_t j = 0; j < item_dim; ++j)
      xi[j] = batch.item_inputs(b, static_cast<Eigen::Index>(j));
    const std::vector<double> eu = nn::serial::forward(model.user_tower, xu);
    const std::vector<double> ei = nn::serial::forward(model.item_tower, xi);
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += eu[j] * ei[j];
    const double resid = batch.targets[b] - s;
    const double coeff = -2.0 * inv_n * resid;
    out.mse += resid * resid;

    std::vector<double> up_user(p), up_item(p);
    for (std::size_t j = 0; j < p; ++j) {
      up_user[j] = coeff * ei[j];
      up_item[j] = coeff * eu[j];
    }
    const nn::serial::FlatGrad gu = nn::serial::backward(model.user_tower, xu, up_user);
    const nn::serial::FlatGrad gi = nn::serial::backward(model.item_tower, xi, up_item);
    for (std::size_t l = 0; l < model.user_tower.layers.size(); ++l) {
      const auto cols = static_cast<std::size_t>(model.user_tower.layers[l].weights.cols());
      for (Eigen::Index i = 0; i < out.grad.user.weights[l].rows(); ++i)
        for (Eigen::Index j = 0; j < out.grad.user.weights[l].cols(); ++j)
          out.grad.user.weights[l](i, j) +=
              gu.weights[l][static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < out.grad.user.bias[l].size(); ++i)
        out.grad.user.bias[l][i] += gu.bias[l][static_cast<std::size_t>(i)];
    }
    for (std::size_t l = 0; l < model.item_tower.layers.size(); ++l) {
      const auto cols = static_cast<std::size_t>(model.item_tower.layers[l].weights.cols());
      for (Eigen::Index i = 0; i < out.grad.item.weights[l].rows(); ++i)
        for (Eigen::Index j = 0; j < out.grad.item.weights[l].cols(); ++j)
          out.grad.item.weights[l](i, j) +=
              gi.weights[l][static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < out.grad.item.bias[l].size(); ++i)
        out.grad.item.bias[l][i] += gi.bias[l][static_cast<std::size_t>(i)];
    }
  }
  out.mse *= inv_n;
  add_penalty_gradient(model, lambda, out.grad);
  return out;
}

}  // namespace serial

}  // namespace ttrec::twotower
