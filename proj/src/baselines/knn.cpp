// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/baselines/knn.hpp"

#include <algorithm>

#include "ttrec/error.hpp"

namespace ttrec::baselines {

namespace {

// msd over the sorted co-rated intersection; negative when nothing co-rated.
double msd_or_negative(const std::vector<std::pair<int, double>>& a,
                       const std::vector<std::pair<int, double>>& b) {
  std::size_t ia = 0, ib = 0;
  double sum = 0.0;
  int common = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia].first < b[ib].first) {
      ++ia;
    } else if (a[ia].first > b[ib].first) {
      ++ib;
    } else {
      const double d = a[ia].second - b[ib].second;
      sum += d * d;
      ++common;
      ++ia;
      ++ib;
    }
  }
  return common == 0 ? -1.0 : sum / static_cast<double>(common);
}

}  // namespace

KnnModel fit_knn(const data::ObservationSet& data, KnnMode mode, int k) {
  require(k >= 1, Errc::invalid_argument, "KNN needs k >= 1");
  KnnModel m;
  m.index = build_rating_index(data);
  m.mode = mode;
  m.k = k;
  m.global_mean = m.index.global_mean;

  const auto& profiles = mode == KnnMode::user_based ? m.index.by_user : m.index.by_item;
  const int n = static_cast<int>(profiles.size());
  m.similarity = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double msd = msd_or_negative(profiles[static_cast<std::size_t>(a)],
                                         profiles[static_cast<std::size_t>(b)]);
      if (msd >= 0.0) {
        const double sim = 1.0 / (msd + 1.0);
        m.similarity(a, b) = sim;
        m.similarity(b, a) = sim;
      }
    }
  }
  return m;
}

KnnPrediction predict_knn(const KnnModel& model, std::int64_t user, std::int64_t item) {
  const int u = model.index.users.find(user);
  const int i = model.index.items.find(item);
  if (u < 0 || i < 0) return {model.global_mean, true};

  // Agent asks, raters answer: in user_based mode the candidate neighbors of
  // u are the users that rated i; in item_based mode the items u rated.
  const int agent = model.mode == KnnMode::user_based ? u : i;
  const auto& raters = model.mode == KnnMode::user_based
                           ? model.index.by_item[static_cast<std::size_t>(i)]
                           : model.index.by_user[static_cast<std::size_t>(u)];

  std::vector<std::pair<double, std::pair<int, double>>> linked;  // (sim, (id, rating))
  for (const auto& [other, rating] : raters) {
    if (other == agent) continue;
    const double sim = model.similarity(agent, other);
    if (sim > 0.0) linked.push_back({sim, {other, rating}});
  }
  if (linked.empty()) return {model.global_mean, true};

  const std::size_t keep = std::min<std::size_t>(linked.size(), static_cast<std::size_t>(model.k));
  std::partial_sort(linked.begin(), linked.begin() + static_cast<std::ptrdiff_t>(keep),
                    linked.end(), [](const auto& x, const auto& y) {
                      if (x.first != y.first) return x.first > y.first;
                      return x.second.first < y.second.first;
                    });
  double wsum = 0.0, vsum = 0.0;
  for (std::size_t t = 0; t < keep; ++t) {
    wsum += linked[t].first;
    vsum += linked[t].first * linked[t].second.second;
  }
  return {vsum / wsum, false};
}

}  // namespace ttrec::baselines
