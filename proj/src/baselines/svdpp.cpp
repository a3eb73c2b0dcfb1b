// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/baselines/svdpp.hpp"

#include <cmath>

#include "ttrec/error.hpp"
#include "ttrec/rng.hpp"

namespace ttrec::baselines {

namespace {

// p_u + |N(u)|^{-1/2} sum_{j in N(u)} y_j for user row u.
Eigen::VectorXd implicit_profile(const SvdPpModel& m, int u) {
  Eigen::VectorXd prof = m.user_factors.row(u).transpose();
  const auto& rated = m.index.by_user[static_cast<std::size_t>(u)];
  if (rated.empty()) return prof;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(rated.size()));
  for (const auto& [j, rating] : rated) prof += inv_sqrt * m.implicit_factors.row(j).transpose();
  return prof;
}

}  // namespace

SvdPpModel fit_svdpp(const data::ObservationSet& data, int rank, double reg, double lr,
                     int epochs, double init_std, std::uint64_t seed) {
  require(rank >= 1, Errc::invalid_argument, "SVD++ rank must be >= 1");
  require(reg >= 0.0 && lr > 0.0, Errc::invalid_argument,
          "SVD++ needs reg >= 0 and a positive learning rate");
  require(epochs >= 1, Errc::invalid_argument, "SVD++ needs at least one epoch");
  require(init_std >= 0.0, Errc::invalid_argument, "SVD++ init_std must be >= 0");

  SvdPpModel m;
  m.index = build_rating_index(data);
  m.global_mean = m.index.global_mean;
  m.reg = reg;
  m.rank = rank;
  const int n = m.index.users.size(), k = m.index.items.size();
  m.user_bias = Eigen::VectorXd::Zero(n);
  m.item_bias = Eigen::VectorXd::Zero(k);
  m.user_factors.resize(n, rank);
  m.item_factors.resize(k, rank);
  m.implicit_factors.resize(k, rank);
  Rng rng(derive_seed(seed, 22));
  for (auto* mat : {&m.user_factors, &m.item_factors, &m.implicit_factors})
    for (Eigen::Index r = 0; r < mat->rows(); ++r)
      for (int f = 0; f < rank; ++f) (*mat)(r, f) = init_std * rng.gaussian();

  // Pre-resolved dense indices, in the stored rating order.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(data.ratings.size());
  for (const auto& r : data.ratings)
    pairs.emplace_back(m.index.users.find(r.user), m.index.items.find(r.item));

  m.objective_trace.push_back(svdpp_objective(m));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t t = 0; t < data.ratings.size(); ++t) {
      const auto [u, i] = pairs[t];
      const auto& rated = m.index.by_user[static_cast<std::size_t>(u)];
      const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(rated.size()));
      const Eigen::VectorXd prof = implicit_profile(m, u);
      const Eigen::VectorXd q_old = m.item_factors.row(i).transpose();
      const Eigen::VectorXd p_old = m.user_factors.row(u).transpose();
      const double err = data.ratings[t].value -
                         (m.global_mean + m.user_bias[u] + m.item_bias[i] + q_old.dot(prof));

      m.user_bias[u] += lr * (err - reg * m.user_bias[u]);
      m.item_bias[i] += lr * (err - reg * m.item_bias[i]);
      m.user_factors.row(u) += lr * (err * q_old - reg * p_old).transpose();
      m.item_factors.row(i) += lr * (err * prof - reg * q_old).transpose();
      for (const auto& [j, rating] : rated) {
        m.implicit_factors.row(j) +=
            lr * (err * inv_sqrt * q_old.transpose() - reg * m.implicit_factors.row(j));
      }
    }
    m.objective_trace.push_back(svdpp_objective(m));
  }
  return m;
}

double predict_svdpp(const SvdPpModel& model, std::int64_t user, std::int64_t item) {
  const int u = model.index.users.find(user);
  const int i = model.index.items.find(item);
  if (u < 0 || i < 0) return model.global_mean;
  return model.global_mean + model.user_bias[u] + model.item_bias[i] +
         model.item_factors.row(i).dot(implicit_profile(model, u));
}

double svdpp_objective(const SvdPpModel& m) {
  double sse = 0.0;
  for (std::size_t u = 0; u < m.index.by_user.size(); ++u) {
    const Eigen::VectorXd prof = implicit_profile(m, static_cast<int>(u));
    for (const auto& [i, rating] : m.index.by_user[u]) {
      const double err = rating - (m.global_mean + m.user_bias[static_cast<Eigen::Index>(u)] +
                                   m.item_bias[i] + m.item_factors.row(i).dot(prof));
      sse += err * err;
    }
  }
  return sse + m.reg * (m.user_bias.squaredNorm() + m.item_bias.squaredNorm() +
                        m.user_factors.squaredNorm() + m.item_factors.squaredNorm() +
                        m.implicit_factors.squaredNorm());
}

}  // namespace ttrec::baselines
