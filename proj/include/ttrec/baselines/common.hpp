// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared plumbing for the id-based baseline predictors: a deterministic
// mapping from external int64 ids to dense row indices, built from the ids
// that actually carry ratings. Ids outside the mapping are what the
// predictors' global-mean fallbacks are for.

#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ttrec/data/observations.hpp"

namespace ttrec::baselines {

class IdIndex {
 public:
  IdIndex() = default;
  explicit IdIndex(std::vector<std::int64_t> sorted_unique_ids);

  int size() const { return static_cast<int>(ids_.size()); }
  // Dense index of an id, or -1 when the id never occurred.
  int find(std::int64_t id) const {
    const auto it = pos_.find(id);
    return it == pos_.end() ? -1 : it->second;
  }
  std::int64_t id_at(int index) const { return ids_[static_cast<std::size_t>(index)]; }
  const std::vector<std::int64_t>& ids() const { return ids_; }

 private:
  std::vector<std::int64_t> ids_;
  std::unordered_map<std::int64_t, int> pos_;
};

struct RatingIndex {
  IdIndex users;
  IdIndex items;
  // by_user[u] holds (item index, rating) in ascending item order; by_item
  // symmetrically. Both views cover exactly the training ratings.
  std::vector<std::vector<std::pair<int, double>>> by_user;
  std::vector<std::vector<std::pair<int, double>>> by_item;
  double global_mean = 0.0;
};

// Rejects an empty rating list; ids are indexed in ascending order.
RatingIndex build_rating_index(const data::ObservationSet& obs);

}  // namespace ttrec::baselines
