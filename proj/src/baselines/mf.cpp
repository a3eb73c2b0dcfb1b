// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/baselines/mf.hpp"

#include "ttrec/error.hpp"
#include "ttrec/rng.hpp"

namespace ttrec::baselines {

namespace {

// One ridge half-sweep: re-solve every row of `solve_for` against the fixed
// `fixed` factors. rows[k] lists (fixed-side index, rating) for row k.
void half_sweep(Eigen::MatrixXd& solve_for, const Eigen::MatrixXd& fixed,
                const std::vector<std::vector<std::pair<int, double>>>& rows, double reg) {
  const int rank = static_cast<int>(fixed.cols());
  Eigen::MatrixXd gram(rank, rank);
  Eigen::VectorXd rhs(rank);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    gram.setZero();
    rhs.setZero();
    for (const auto& [other, rating] : rows[k]) {
      const auto q = fixed.row(other);
      gram.noalias() += q.transpose() * q;
      rhs.noalias() += rating * q.transpose();
    }
    gram.diagonal().array() += reg;
    solve_for.row(static_cast<Eigen::Index>(k)) = gram.ldlt().solve(rhs).transpose();
  }
}

}  // namespace

MfModel fit_rsvd(const data::ObservationSet& data, int rank, double reg, int iters,
                 std::uint64_t seed) {
  require(rank >= 1, Errc::invalid_argument, "rSVD rank must be >= 1");
  require(reg >= 0.0, Errc::invalid_argument, "rSVD regularization must be >= 0");
  require(iters >= 1, Errc::invalid_argument, "rSVD needs at least one sweep");

  MfModel model;
  model.index = build_rating_index(data);
  model.global_mean = model.index.global_mean;
  model.reg = reg;
  model.rank = rank;
  model.user_factors = Eigen::MatrixXd::Zero(model.index.users.size(), rank);
  model.item_factors.resize(model.index.items.size(), rank);
  Rng rng(derive_seed(seed, 21));
  for (Eigen::Index i = 0; i < model.item_factors.rows(); ++i)
    for (int f = 0; f < rank; ++f) model.item_factors(i, f) = 0.1 * rng.gaussian();

  model.objective_trace.push_back(mf_objective(model));
  for (int sweep = 0; sweep < iters; ++sweep) {
    half_sweep(model.user_factors, model.item_factors, model.index.by_user, reg);
    model.objective_trace.push_back(mf_objective(model));
    half_sweep(model.item_factors, model.user_factors, model.index.by_item, reg);
    model.objective_trace.push_back(mf_objective(model));
  }
  return model;
}

double predict_mf(const MfModel& model, std::int64_t user, std::int64_t item) {
  const int u = model.index.users.find(user);
  const int i = model.index.items.find(item);
  if (u < 0 || i < 0) return model.global_mean;
  return model.user_factors.row(u).dot(model.item_factors.row(i));
}

double mf_objective(const MfModel& model) {
  double sse = 0.0;
  for (std::size_t u = 0; u < model.index.by_user.size(); ++u) {
    for (const auto& [i, rating] : model.index.by_user[u]) {
      const double err =
          rating - model.user_factors.row(static_cast<Eigen::Index>(u)).dot(model.item_factors.row(i));
      sse += err * err;
    }
  }
  return sse + model.reg * (model.user_factors.squaredNorm() + model.item_factors.squaredNorm());
}

}  // namespace ttrec::baselines
