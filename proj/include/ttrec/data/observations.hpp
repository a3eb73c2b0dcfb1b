// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Ratings plus per-id covariate tables, and their CSV forms. Covariate tables
// are shared between splits through shared_ptr so splitting never copies the
// feature matrices.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace ttrec::data {

struct Rating {
  std::int64_t user = 0;
  std::int64_t item = 0;
  double value = 0.0;
};

class CovariateTable {
 public:
  CovariateTable() = default;
  // ids must be unique; rows.row(k) belongs to ids[k].
  CovariateTable(std::vector<std::int64_t> ids, Eigen::MatrixXd rows);

  int dim() const { return static_cast<int>(rows_.cols()); }
  std::int64_t size() const { return static_cast<std::int64_t>(ids_.size()); }
  bool contains(std::int64_t id) const { return index_.count(id) != 0; }
  Eigen::Index row_index(std::int64_t id) const;  // throws if missing
  const Eigen::MatrixXd& rows() const { return rows_; }
  const std::vector<std::int64_t>& ids() const { return ids_; }

 private:
  std::vector<std::int64_t> ids_;
  std::unordered_map<std::int64_t, Eigen::Index> index_;
  Eigen::MatrixXd rows_;
};

struct ObservationSet {
  std::vector<Rating> ratings;
  std::shared_ptr<const CovariateTable> user_covariates;
  std::shared_ptr<const CovariateTable> item_covariates;
};

// Rejects duplicate (user, item) pairs, non-finite ratings, and rated ids
// missing from a covariate table (when tables are present).
void validate(const ObservationSet& obs);

// Same covariate tables, ratings restricted to the given indices.
ObservationSet subset(const ObservationSet& obs, const std::vector<std::size_t>& indices);

// CSV: header "user_id,item_id,rating", one rating per line, full precision.
void write_ratings_csv(const std::string& path, const std::vector<Rating>& ratings);
std::vector<Rating> read_ratings_csv(const std::string& path);

// CSV: header "id,c1,...,cD", one id per line, full precision.
void write_covariates_csv(const std::string& path, const CovariateTable& table);
CovariateTable read_covariates_csv(const std::string& path);

}  // namespace ttrec::data
