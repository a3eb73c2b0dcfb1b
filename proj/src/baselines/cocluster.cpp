// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/baselines/cocluster.hpp"

#include "ttrec/error.hpp"
#include "ttrec/rng.hpp"

namespace ttrec::baselines {

namespace {

// Rating-weighted means for the current assignments. Cells and clusters with
// no ratings fall back to the global mean so every prediction stays finite.
void refresh_stats(CoClusterModel& m, int g_u, int g_i) {
  Eigen::MatrixXd cell_sum = Eigen::MatrixXd::Zero(g_u, g_i);
  Eigen::MatrixXd cell_cnt = Eigen::MatrixXd::Zero(g_u, g_i);
  Eigen::VectorXd uc_sum = Eigen::VectorXd::Zero(g_u), uc_cnt = Eigen::VectorXd::Zero(g_u);
  Eigen::VectorXd ic_sum = Eigen::VectorXd::Zero(g_i), ic_cnt = Eigen::VectorXd::Zero(g_i);
  for (std::size_t u = 0; u < m.index.by_user.size(); ++u) {
    const int cu = m.user_cluster[u];
    for (const auto& [i, rating] : m.index.by_user[u]) {
      const int ci = m.item_cluster[static_cast<std::size_t>(i)];
      cell_sum(cu, ci) += rating;
      cell_cnt(cu, ci) += 1.0;
      uc_sum[cu] += rating;
      uc_cnt[cu] += 1.0;
      ic_sum[ci] += rating;
      ic_cnt[ci] += 1.0;
    }
  }
  m.cocluster_mean.resize(g_u, g_i);
  for (int a = 0; a < g_u; ++a)
    for (int b = 0; b < g_i; ++b)
      m.cocluster_mean(a, b) = cell_cnt(a, b) > 0.0 ? cell_sum(a, b) / cell_cnt(a, b)
                                                    : m.global_mean;
  m.user_cluster_mean.resize(g_u);
  for (int a = 0; a < g_u; ++a)
    m.user_cluster_mean[a] = uc_cnt[a] > 0.0 ? uc_sum[a] / uc_cnt[a] : m.global_mean;
  m.item_cluster_mean.resize(g_i);
  for (int b = 0; b < g_i; ++b)
    m.item_cluster_mean[b] = ic_cnt[b] > 0.0 ? ic_sum[b] / ic_cnt[b] : m.global_mean;
}

double predict_known(const CoClusterModel& m, int u, int i) {
  const int cu = m.user_cluster[static_cast<std::size_t>(u)];
  const int ci = m.item_cluster[static_cast<std::size_t>(i)];
  return m.cocluster_mean(cu, ci) + (m.user_mean[u] - m.user_cluster_mean[cu]) +
         (m.item_mean[i] - m.item_cluster_mean[ci]);
}

}  // namespace

double cocluster_sse(const CoClusterModel& m) {
  double sse = 0.0;
  for (std::size_t u = 0; u < m.index.by_user.size(); ++u) {
    for (const auto& [i, rating] : m.index.by_user[u]) {
      const double err = rating - predict_known(m, static_cast<int>(u), i);
      sse += err * err;
    }
  }
  return sse;
}

CoClusterModel fit_cocluster(const data::ObservationSet& data, int g_u, int g_i, int iters,
                             std::uint64_t seed) {
  CoClusterModel m;
  m.index = build_rating_index(data);
  require(g_u >= 1 && g_u <= m.index.users.size(), Errc::invalid_argument,
          "user cluster count must be in [1, rated users]");
  require(g_i >= 1 && g_i <= m.index.items.size(), Errc::invalid_argument,
          "item cluster count must be in [1, rated items]");
  require(iters >= 1, Errc::invalid_argument, "co-clustering needs at least one round");
  m.global_mean = m.index.global_mean;

  const int n = m.index.users.size(), k = m.index.items.size();
  m.user_mean.resize(n);
  for (int u = 0; u < n; ++u) {
    double s = 0.0;
    for (const auto& [i, rating] : m.index.by_user[static_cast<std::size_t>(u)]) s += rating;
    m.user_mean[u] = s / static_cast<double>(m.index.by_user[static_cast<std::size_t>(u)].size());
  }
  m.item_mean.resize(k);
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (const auto& [u, rating] : m.index.by_item[static_cast<std::size_t>(i)]) s += rating;
    m.item_mean[i] = s / static_cast<double>(m.index.by_item[static_cast<std::size_t>(i)].size());
  }

  Rng rng(derive_seed(seed, 23));
  m.user_cluster.resize(static_cast<std::size_t>(n));
  for (auto& c : m.user_cluster)
    c = static_cast<int>(rng.uniform_u64_below(static_cast<std::uint64_t>(g_u)));
  m.item_cluster.resize(static_cast<std::size_t>(k));
  for (auto& c : m.item_cluster)
    c = static_cast<int>(rng.uniform_u64_below(static_cast<std::uint64_t>(g_i)));

  refresh_stats(m, g_u, g_i);
  m.sse_trace.push_back(cocluster_sse(m));

  for (int round = 0; round < iters; ++round) {
    const CoClusterModel snapshot = m;

    // Move every user to its per-user optimum under the round's statistics,
    // then every item (seeing the new user assignments), lower cluster on ties.
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      int best_c = m.user_cluster[static_cast<std::size_t>(u)];
      double best_sse = -1.0;
      for (int c = 0; c < g_u; ++c) {
        double sse = 0.0;
        for (const auto& [i, rating] : m.index.by_user[static_cast<std::size_t>(u)]) {
          const int ci = m.item_cluster[static_cast<std::size_t>(i)];
          const double pred = m.cocluster_mean(c, ci) + (m.user_mean[u] - m.user_cluster_mean[c]) +
                              (m.item_mean[i] - m.item_cluster_mean[ci]);
          const double err = rating - pred;
          sse += err * err;
        }
        if (best_sse < 0.0 || sse < best_sse) {
          best_sse = sse;
          best_c = c;
        }
      }
      changed |= best_c != m.user_cluster[static_cast<std::size_t>(u)];
      m.user_cluster[static_cast<std::size_t>(u)] = best_c;
    }
    for (int i = 0; i < k; ++i) {
      int best_c = m.item_cluster[static_cast<std::size_t>(i)];
      double best_sse = -1.0;
      for (int c = 0; c < g_i; ++c) {
        double sse = 0.0;
        for (const auto& [u, rating] : m.index.by_item[static_cast<std::size_t>(i)]) {
          const int cu = m.user_cluster[static_cast<std::size_t>(u)];
          const double pred = m.cocluster_mean(cu, c) + (m.user_mean[u] - m.user_cluster_mean[cu]) +
                              (m.item_mean[i] - m.item_cluster_mean[c]);
          const double err = rating - pred;
          sse += err * err;
        }
        if (best_sse < 0.0 || sse < best_sse) {
          best_sse = sse;
          best_c = c;
        }
      }
      changed |= best_c != m.item_cluster[static_cast<std::size_t>(i)];
      m.item_cluster[static_cast<std::size_t>(i)] = best_c;
    }

    refresh_stats(m, g_u, g_i);
    const double sse = cocluster_sse(m);
    if (sse > m.sse_trace.back()) {
      m = snapshot;  // the move round overshot; keep the better state
      break;
    }
    m.sse_trace.push_back(sse);
    if (!changed) break;
  }
  return m;
}

double predict_cocluster(const CoClusterModel& model, std::int64_t user, std::int64_t item) {
  const int u = model.index.users.find(user);
  const int i = model.index.items.find(item);
  if (u >= 0 && i >= 0) return predict_known(model, u, i);
  if (u >= 0) return model.user_mean[u];
  if (i >= 0) return model.item_mean[i];
  return model.global_mean;
}

}  // namespace ttrec::baselines
