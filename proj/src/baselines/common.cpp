// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/baselines/common.hpp"

#include <algorithm>

#include "ttrec/error.hpp"

namespace ttrec::baselines {

IdIndex::IdIndex(std::vector<std::int64_t> sorted_unique_ids) : ids_(std::move(sorted_unique_ids)) {
  pos_.reserve(ids_.size());
  for (std::size_t k = 0; k < ids_.size(); ++k)
    pos_.emplace(ids_[k], static_cast<int>(k));
}

namespace {

IdIndex index_of(const std::vector<data::Rating>& ratings, bool user_side) {
  std::vector<std::int64_t> ids;
  ids.reserve(ratings.size());
  for (const auto& r : ratings) ids.push_back(user_side ? r.user : r.item);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return IdIndex(std::move(ids));
}

}  // namespace

RatingIndex build_rating_index(const data::ObservationSet& obs) {
  require(!obs.ratings.empty(), Errc::invalid_argument, "cannot index an empty rating set");
  RatingIndex idx;
  idx.users = index_of(obs.ratings, true);
  idx.items = index_of(obs.ratings, false);
  idx.by_user.resize(static_cast<std::size_t>(idx.users.size()));
  idx.by_item.resize(static_cast<std::size_t>(idx.items.size()));
  double sum = 0.0;
  for (const auto& r : obs.ratings) {
    const int u = idx.users.find(r.user);
    const int i = idx.items.find(r.item);
    idx.by_user[static_cast<std::size_t>(u)].emplace_back(i, r.value);
    idx.by_item[static_cast<std::size_t>(i)].emplace_back(u, r.value);
    sum += r.value;
  }
  for (auto& row : idx.by_user) std::sort(row.begin(), row.end());
  for (auto& row : idx.by_item) std::sort(row.begin(), row.end());
  idx.global_mean = sum / static_cast<double>(obs.ratings.size());
  return idx;
}

}  // namespace ttrec::baselines
