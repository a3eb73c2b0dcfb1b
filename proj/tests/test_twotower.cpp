// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Two-tower scoring, objective, exact minibatch gradients, and training.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "test_util.hpp"
#include "ttrec/data/observations.hpp"
#include "ttrec/error.hpp"
#include "ttrec/parallel.hpp"
#include "ttrec/rng.hpp"
#include "ttrec/synth/generator.hpp"
#include "ttrec/twotower/model.hpp"
#include "ttrec/twotower/train.hpp"

using namespace ttrec;
using twotower::PairBatch;
using twotower::TwoTowerModel;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nn::Activation;

namespace {

TwoTowerModel linear_towers(const MatrixXd& wu, const VectorXd& bu, const MatrixXd& wi,
                            const VectorXd& bi) {
  TwoTowerModel m;
  m.user_tower.layers.push_back({wu, bu});
  m.item_tower.layers.push_back({wi, bi});
  return m;
}

// Tiny observation set with explicit covariates and ratings.
data::ObservationSet make_obs(const MatrixXd& user_rows, const MatrixXd& item_rows,
                              const std::vector<data::Rating>& ratings) {
  data::ObservationSet obs;
  std::vector<std::int64_t> uids(static_cast<std::size_t>(user_rows.rows()));
  for (std::size_t k = 0; k < uids.size(); ++k) uids[k] = static_cast<std::int64_t>(k);
  std::vector<std::int64_t> iids(static_cast<std::size_t>(item_rows.rows()));
  for (std::size_t k = 0; k < iids.size(); ++k) iids[k] = static_cast<std::int64_t>(k);
  obs.user_covariates = std::make_shared<data::CovariateTable>(uids, user_rows);
  obs.item_covariates = std::make_shared<data::CovariateTable>(iids, item_rows);
  obs.ratings = ratings;
  return obs;
}

PairBatch random_batch(Rng& rng, const TwoTowerModel& model, int n) {
  PairBatch batch;
  batch.user_inputs.resize(n, model.user_tower.input_dim());
  batch.item_inputs.resize(n, model.item_tower.input_dim());
  batch.targets.resize(n);
  for (int b = 0; b < n; ++b) {
    for (int j = 0; j < model.user_tower.input_dim(); ++j)
      batch.user_inputs(b, j) = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < model.item_tower.input_dim(); ++j)
      batch.item_inputs(b, j) = rng.uniform(-1.0, 1.0);
    batch.targets[b] = rng.uniform(-2.0, 2.0);
  }
  return batch;
}

}  // namespace

TEST_CASE("score: identity towers give the inner product; bilinear in inputs") {
  TwoTowerModel m = linear_towers(MatrixXd::Identity(3, 3), VectorXd::Zero(3),
                                  MatrixXd::Identity(3, 3), VectorXd::Zero(3));
  VectorXd xu(3), xi(3);
  xu << 1.0, 2.0, -0.5;
  xi << 0.5, -1.0, 2.0;
  const double s = twotower::score(m, xu, xi);
  CHECK(s == xu.dot(xi));
  CHECK(twotower::score(m, 2.0 * xu, xi) == 2.0 * s);  // linear towers scale linearly
}

TEST_CASE("penalty: hand-computed parameter norms") {
  MatrixXd wu(1, 2);
  wu << 1.0, 1.0;
  VectorXd bu(1);
  bu << 1.0;
  MatrixXd wi(1, 1);
  wi << 2.0;
  TwoTowerModel m = linear_towers(wu, bu, wi, VectorXd::Zero(1));
  CHECK(twotower::penalty(m) == 7.0);  // (1+1) + 1 + 4 + 0
}

TEST_CASE("objective: squared residual plus scaled penalty") {
  MatrixXd wu = MatrixXd::Zero(1, 2);
  MatrixXd wi = MatrixXd::Zero(1, 1);
  TwoTowerModel zero = linear_towers(wu, VectorXd::Zero(1), wi, VectorXd::Zero(1));
  const auto obs = make_obs(MatrixXd::Constant(1, 2, 0.5), MatrixXd::Constant(1, 1, 0.5),
                            {{0, 0, 2.0}});
  // Zero towers score 0; the single rating is 2, so the objective is 4.
  CHECK(twotower::objective(zero, obs, 0.0) == 4.0);

  Rng rng(3);
  TwoTowerModel m{testutil::random_net(rng, {2, 4, 3}, Activation::relu),
                  testutil::random_net(rng, {1, 4, 3}, Activation::relu)};
  const double base = twotower::objective(m, obs, 0.0);
  const double reg = twotower::objective(m, obs, 0.5);
  CHECK(reg - base == doctest::Approx(0.5 * twotower::penalty(m)).epsilon(1e-14));
}

TEST_CASE("sgd_step: matches the hand-derived gradient for linear towers") {
  // One observation, one linear layer per tower. With e_u = W_u x_u + b_u,
  // e_i = W_i x_i + b_i, s = <e_u, e_i>, r = k - s, the exact gradient of
  // (k - s)^2 + lambda * J is:
  //   dW_u = -2 r e_i x_u^T + 2 lambda W_u      db_u = -2 r e_i + 2 lambda b_u
  // and symmetrically for the item tower.
  MatrixXd wu(2, 2), wi(2, 2);
  wu << 1.0, 0.5, -0.25, 0.75;
  wi << 0.2, -0.4, 0.6, 0.3;
  VectorXd bu(2), bi(2);
  bu << 0.1, -0.3;
  bi << -0.2, 0.5;
  VectorXd xu(2), xi(2);
  xu << 0.8, -0.5;
  xi << 0.4, 0.9;
  const double k = 1.2, lambda = 0.01, lr = 0.05;

  const VectorXd eu = wu * xu + bu;
  const VectorXd ei = wi * xi + bi;
  const double r = k - eu.dot(ei);
  const MatrixXd want_wu = wu - lr * (-2.0 * r * ei * xu.transpose() + 2.0 * lambda * wu);
  const VectorXd want_bu = bu - lr * (-2.0 * r * ei + 2.0 * lambda * bu);
  const MatrixXd want_wi = wi - lr * (-2.0 * r * eu * xi.transpose() + 2.0 * lambda * wi);
  const VectorXd want_bi = bi - lr * (-2.0 * r * eu + 2.0 * lambda * bi);

  TwoTowerModel m = linear_towers(wu, bu, wi, bi);
  PairBatch batch;
  batch.user_inputs = xu.transpose();
  batch.item_inputs = xi.transpose();
  batch.targets = VectorXd::Constant(1, k);
  twotower::sgd_step(m, batch, lr, lambda);

  CHECK((m.user_tower.layers[0].weights - want_wu).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((m.user_tower.layers[0].bias - want_bu).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((m.item_tower.layers[0].weights - want_wi).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((m.item_tower.layers[0].bias - want_bi).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("objective_gradient: entrywise finite-difference consistency") {
  Rng rng(2028);
  for (int trial = 0; trial < 6; ++trial) {
    TwoTowerModel m{testutil::random_net(rng, {4, 6, 3}, Activation::sigmoid),
                    testutil::random_net(rng, {3, 5, 3}, Activation::sigmoid)};
    PairBatch batch = random_batch(rng, m, 5);
    const double lambda = (trial % 2 == 0) ? 0.0 : 0.05;

    const twotower::BatchGradient g = twotower::objective_gradient(m, batch, lambda);
    const auto eval = [&]() { return twotower::objective_batch(m, batch, lambda); };

    const auto res_user = testutil::check_gradient(
        m.user_tower, eval,
        [&](std::size_t l, bool is_bias, Eigen::Index i, Eigen::Index j) {
          return is_bias ? g.grad.user.bias[l][i] : g.grad.user.weights[l](i, j);
        },
        1e-5, 1e-5, 1e-8);
    const auto res_item = testutil::check_gradient(
        m.item_tower, eval,
        [&](std::size_t l, bool is_bias, Eigen::Index i, Eigen::Index j) {
          return is_bias ? g.grad.item.bias[l][i] : g.grad.item.weights[l](i, j);
        },
        1e-5, 1e-5, 1e-8);
    CHECK(res_user.max_err <= 1e-5);
    CHECK(res_item.max_err <= 1e-5);
  }
}

TEST_CASE("objective_gradient: descent direction shrinks the objective (first order)") {
  Rng rng(31);
  TwoTowerModel m{testutil::random_net(rng, {5, 8, 4}, Activation::sigmoid),
                  testutil::random_net(rng, {4, 7, 4}, Activation::sigmoid)};
  PairBatch batch = random_batch(rng, m, 12);
  const double lambda = 0.1;
  const twotower::BatchGradient g = twotower::objective_gradient(m, batch, lambda);

  double grad_norm2 = 0.0;
  for (const auto* side : {&g.grad.user, &g.grad.item}) {
    for (const auto& w : side->weights) grad_norm2 += w.squaredNorm();
    for (const auto& b : side->bias) grad_norm2 += b.squaredNorm();
  }
  REQUIRE(grad_norm2 > 0.0);

  const double before = twotower::objective_batch(m, batch, lambda);
  const double lr = 1e-6;
  TwoTowerModel stepped = m;
  twotower::apply_step(stepped, g.grad, -lr);
  const double after = twotower::objective_batch(stepped, batch, lambda);
  const double ratio = (after - before) / (-lr * grad_norm2);
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("objective_gradient: chunked parallel kernel equals the serial reference") {
  Rng rng(37);
  for (int trial = 0; trial < 4; ++trial) {
    const Activation act = (trial % 2 == 0) ? Activation::relu : Activation::sigmoid;
    TwoTowerModel m{testutil::random_net(rng, {6, 10, 4}, act),
                    testutil::random_net(rng, {5, 9, 4}, act)};
    PairBatch batch = random_batch(rng, m, 101);  // forces a short tail chunk
    const twotower::BatchGradient fast = twotower::objective_gradient(m, batch, 0.03);
    const twotower::BatchGradient ref = twotower::serial::objective_gradient(m, batch, 0.03);
    CHECK(fast.mse == doctest::Approx(ref.mse).epsilon(1e-12));
    for (std::size_t l = 0; l < m.user_tower.layers.size(); ++l) {
      CHECK((fast.grad.user.weights[l] - ref.grad.user.weights[l]).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, ref.grad.user.weights[l].cwiseAbs().maxCoeff()));
    }
    for (std::size_t l = 0; l < m.item_tower.layers.size(); ++l) {
      CHECK((fast.grad.item.weights[l] - ref.grad.item.weights[l]).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, ref.grad.item.weights[l].cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("objective_gradient: bit-identical across thread counts") {
  Rng rng(41);
  TwoTowerModel m{testutil::random_net(rng, {6, 8, 4}, Activation::relu),
                  testutil::random_net(rng, {6, 8, 4}, Activation::relu)};
  PairBatch batch = random_batch(rng, m, 160);

  set_threads(1);
  const twotower::BatchGradient g1 = twotower::objective_gradient(m, batch, 0.01);
  set_threads(4);
  const twotower::BatchGradient g4 = twotower::objective_gradient(m, batch, 0.01);
  set_threads(0);

  CHECK(g1.mse == g4.mse);
  for (std::size_t l = 0; l < m.user_tower.layers.size(); ++l) {
    CHECK(g1.grad.user.weights[l] == g4.grad.user.weights[l]);
    CHECK(g1.grad.user.bias[l] == g4.grad.user.bias[l]);
    CHECK(g1.grad.item.weights[l] == g4.grad.item.weights[l]);
    CHECK(g1.grad.item.bias[l] == g4.grad.item.bias[l]);
  }
}

namespace {

// 60 users x 50 items with 600 constant ratings: enough structure for the
// bookkeeping contracts without real learning difficulty.
std::pair<data::ObservationSet, data::ObservationSet> constant_rating_split(double value) {
  Rng rng(55);
  MatrixXd user_rows(60, 4), item_rows(50, 3);
  for (Eigen::Index r = 0; r < user_rows.rows(); ++r)
    for (Eigen::Index j = 0; j < user_rows.cols(); ++j) user_rows(r, j) = rng.uniform01();
  for (Eigen::Index r = 0; r < item_rows.rows(); ++r)
    for (Eigen::Index j = 0; j < item_rows.cols(); ++j) item_rows(r, j) = rng.uniform01();
  std::vector<data::Rating> ratings;
  for (int k = 0; k < 600; ++k)
    ratings.push_back({static_cast<std::int64_t>(k % 60),
                       static_cast<std::int64_t>((k * 7) % 50), value});
  auto obs = make_obs(user_rows, item_rows, ratings);
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t k = 0; k < ratings.size(); ++k)
    (k % 5 == 4 ? val_idx : train_idx).push_back(k);
  return {data::subset(obs, train_idx), data::subset(obs, val_idx)};
}

}  // namespace

TEST_CASE("train: learning-rate schedule is decayed and floored") {
  const auto [train_set, val_set] = constant_rating_split(2.0);
  TwoTowerModel init = twotower::make_towers(4, 3, 4, {8}, Activation::relu, 7);
  twotower::TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.max_epochs = 12;
  cfg.patience = 12;  // run all epochs
  cfg.seed = 1;
  const auto result = twotower::train(init, train_set, val_set, cfg);

  REQUIRE(result.history.size() == 13);  // init row + 12 epochs
  CHECK(result.history[0].epoch == 0);
  CHECK(result.history[0].lr == 0.0);
  for (int e = 1; e <= 12; ++e) {
    const double want = std::max(1e-2 * std::pow(0.9, e - 1), 5e-3);
    CHECK(result.history[static_cast<std::size_t>(e)].lr == doctest::Approx(want).epsilon(1e-15));
  }
  // Floor becomes active once 1e-2 * 0.9^(e-1) < 5e-3, i.e. from epoch 8 on.
  CHECK(result.history[8].lr == 5e-3);
  CHECK(result.history[12].lr == 5e-3);
}

TEST_CASE("train: best-epoch selection and constant-target sanity") {
  const auto [train_set, val_set] = constant_rating_split(2.0);
  TwoTowerModel init = twotower::make_towers(4, 3, 4, {8}, Activation::relu, 9);
  twotower::TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.max_epochs = 40;
  cfg.patience = 8;
  cfg.seed = 2;
  const auto result = twotower::train(init, train_set, val_set, cfg);

  // Returned parameters reproduce the recorded best validation RMSE exactly.
  const double best_recorded = result.history[static_cast<std::size_t>(result.best_epoch)].val_rmse;
  CHECK(twotower::rmse(result.model, val_set) == best_recorded);
  for (const auto& row : result.history) CHECK(best_recorded <= row.val_rmse);
  // Final model never loses to the untrained model.
  CHECK(best_recorded <= result.history[0].val_rmse);
}

TEST_CASE("train: patience stops a run whose validation never improves") {
  const auto [train_set, val_set_raw] = constant_rating_split(2.0);
  TwoTowerModel init = twotower::make_towers(4, 3, 4, {8}, Activation::relu, 9);

  // Rewrite validation targets to the initial model's exact predictions
  // (through the same batched scoring path that evaluation uses, so they
  // match bitwise). A zero-RMSE starting point cannot be beaten, so the best
  // epoch stays 0 and the patience rule alone must end the run.
  data::ObservationSet val_set = val_set_raw;
  const Eigen::VectorXd init_scores =
      twotower::score_batch(init, twotower::gather_all(val_set));
  for (std::size_t k = 0; k < val_set.ratings.size(); ++k)
    val_set.ratings[k].value = init_scores[static_cast<Eigen::Index>(k)];

  twotower::TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.max_epochs = 40;
  cfg.patience = 8;
  cfg.seed = 2;
  const auto result = twotower::train(init, train_set, val_set, cfg);

  CHECK(result.best_epoch == 0);
  CHECK(result.history[0].val_rmse == 0.0);
  CHECK(result.history.back().epoch == 8);  // first epoch with epoch - best >= patience
  REQUIRE(result.history.size() == 9);
  // The returned model is the untouched initial one.
  for (std::size_t l = 0; l < init.user_tower.layers.size(); ++l) {
    CHECK(result.model.user_tower.layers[l].weights == init.user_tower.layers[l].weights);
    CHECK(result.model.item_tower.layers[l].weights == init.item_tower.layers[l].weights);
  }
}

TEST_CASE("train: deterministic replay across runs and thread counts") {
  const auto [train_set, val_set] = constant_rating_split(1.0);
  TwoTowerModel init = twotower::make_towers(4, 3, 4, {6}, Activation::sigmoid, 11);
  twotower::TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.max_epochs = 6;
  cfg.patience = 6;
  cfg.seed = 77;

  set_threads(1);
  const auto a = twotower::train(init, train_set, val_set, cfg);
  set_threads(4);
  const auto b = twotower::train(init, train_set, val_set, cfg);
  set_threads(0);

  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) {
    CHECK(a.history[k].train_objective == b.history[k].train_objective);
    CHECK(a.history[k].val_rmse == b.history[k].val_rmse);
  }
  for (std::size_t l = 0; l < a.model.user_tower.layers.size(); ++l)
    CHECK(a.model.user_tower.layers[l].weights == b.model.user_tower.layers[l].weights);
}

TEST_CASE("train: synthetic end-to-end run approaches the noise floor") {
  // Low intrinsic dimension keeps the regression statistically easy, so the
  // trained towers must capture most of the signal within the epoch budget.
  synth::SyntheticSpec spec;
  spec.n_users = 200;
  spec.n_items = 200;
  spec.user_dim = 20;
  spec.item_dim = 20;
  spec.embed_dim = 4;
  spec.intrinsic_dim = 2;
  spec.n_ratings = 8000;
  spec.noise_var = 0.1;
  spec.seed = 321;
  const auto data = synth::generate_dataset(spec);

  Rng split_rng(5);
  std::vector<std::size_t> order(data.observations.ratings.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  split_rng.shuffle(order);
  const std::vector<std::size_t> train_idx(order.begin(), order.begin() + 6400);
  const std::vector<std::size_t> val_idx(order.begin() + 6400, order.end());
  const auto train_set = data::subset(data.observations, train_idx);
  const auto val_set = data::subset(data.observations, val_idx);

  TwoTowerModel init = twotower::make_towers(20, 20, 4, {32, 32}, Activation::relu, 13);
  twotower::TrainConfig cfg;
  cfg.lambda = 1e-6;
  cfg.lr_init = 0.05;
  cfg.lr_min = 0.025;
  cfg.max_epochs = 120;
  cfg.patience = 120;
  cfg.seed = 6;
  const auto result = twotower::train(init, train_set, val_set, cfg);

  CHECK(result.best_epoch > 0);
  const double init_rmse = result.history[0].val_rmse;
  const double final_rmse =
      result.history[static_cast<std::size_t>(result.best_epoch)].val_rmse;
  CHECK(final_rmse < 0.8 * init_rmse);            // most of the signal captured
  CHECK(final_rmse < 1.15 * std::sqrt(0.1));      // close to the noise floor
}

TEST_CASE("train: divergence is reported as a training failure") {
  const auto [train_set, val_set] = constant_rating_split(3.0);
  TwoTowerModel init = twotower::make_towers(4, 3, 4, {8, 8}, Activation::relu, 15);
  twotower::TrainConfig cfg;
  cfg.lr_init = 1e9;  // absurd on purpose
  cfg.lr_min = 1e9;
  cfg.max_epochs = 50;
  cfg.seed = 3;
  CHECK_THROWS_AS(twotower::train(init, train_set, val_set, cfg), Error);
}

TEST_CASE("train/objective: empty sets are rejected") {
  const auto [train_set, val_set] = constant_rating_split(1.0);
  data::ObservationSet empty = train_set;
  empty.ratings.clear();
  TwoTowerModel m = twotower::make_towers(4, 3, 2, {4}, Activation::relu, 1);
  CHECK_THROWS_AS(twotower::objective(m, empty, 0.0), Error);
  CHECK_THROWS_AS(twotower::rmse(m, empty), Error);
  twotower::TrainConfig cfg;
  CHECK_THROWS_AS(twotower::train(m, empty, val_set, cfg), Error);
  CHECK_THROWS_AS(twotower::train(m, train_set, empty, cfg), Error);
}

TEST_CASE("make_towers: dimension wiring and mismatch detection") {
  TwoTowerModel m = twotower::make_towers(50, 40, 30, {50, 50, 50, 50}, Activation::relu, 99);
  CHECK(m.user_tower.depth() == 5);
  CHECK(m.user_tower.input_dim() == 50);
  CHECK(m.item_tower.input_dim() == 40);
  CHECK(m.user_tower.output_dim() == 30);
  CHECK(m.item_tower.output_dim() == 30);

  TwoTowerModel bad = m;
  bad.item_tower.layers.back().weights.conservativeResize(29, Eigen::NoChange);
  bad.item_tower.layers.back().bias.conservativeResize(29);
  CHECK_THROWS_AS(twotower::validate(bad), Error);
}
