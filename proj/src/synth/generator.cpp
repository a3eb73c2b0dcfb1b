// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "ttrec/error.hpp"

namespace ttrec::synth {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void validate(const SyntheticSpec& spec) {
  require(spec.n_users > 0 && spec.n_items > 0, Errc::config_invalid,
          "n_users and n_items must be positive");
  require(spec.user_dim > 0 && spec.item_dim > 0, Errc::config_invalid,
          "user_dim and item_dim must be positive");
  require(spec.embed_dim > 0, Errc::config_invalid, "embed_dim must be positive");
  require(spec.intrinsic_dim >= 1 &&
              spec.intrinsic_dim <= std::min(spec.user_dim, spec.item_dim),
          Errc::config_invalid,
          "intrinsic_dim must satisfy 1 <= intrinsic_dim <= min(user_dim, item_dim), got " +
              std::to_string(spec.intrinsic_dim));
  require(spec.n_ratings >= 0, Errc::config_invalid, "n_ratings must be non-negative");
  require(spec.n_ratings <= spec.n_users * spec.n_items, Errc::config_invalid,
          "n_ratings exceeds the number of distinct (user, item) pairs");
  require(spec.noise_var >= 0.0, Errc::config_invalid, "noise_var must be non-negative");
  require(spec.coeff_range > 0.0, Errc::config_invalid, "coeff_range must be positive");
}

namespace {

// Draw order is pinned: sin row-major, then cos, then cross.
EmbeddingCoefficients draw_coefficients(int embed_dim, int dim, double range, Rng& rng) {
  EmbeddingCoefficients c;
  c.sin_coef.resize(embed_dim, dim);
  c.cos_coef.resize(embed_dim, dim);
  c.cross_coef.resize(embed_dim, dim - 1);
  for (int j = 0; j < embed_dim; ++j)
    for (int l = 0; l < dim; ++l) c.sin_coef(j, l) = rng.uniform(-range, range);
  for (int j = 0; j < embed_dim; ++j)
    for (int l = 0; l < dim; ++l) c.cos_coef(j, l) = rng.uniform(-range, range);
  for (int j = 0; j < embed_dim; ++j)
    for (int l = 0; l + 1 < dim; ++l) c.cross_coef(j, l) = rng.uniform(-range, range);
  return c;
}

}  // namespace

GroundTruth draw_ground_truth(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, kStreamGroundTruth));
  GroundTruth gt;
  gt.user = draw_coefficients(spec.embed_dim, spec.user_dim, spec.coeff_range, rng);
  gt.item = draw_coefficients(spec.embed_dim, spec.item_dim, spec.coeff_range, rng);
  return gt;
}

VectorXd true_embedding(const EmbeddingCoefficients& coef, const VectorXd& x) {
  const int dim = static_cast<int>(coef.sin_coef.cols());
  require(x.size() == dim, Errc::dimension_mismatch,
          "true_embedding: point dimension != coefficient dimension");
  const int embed_dim = static_cast<int>(coef.sin_coef.rows());
  VectorXd out = VectorXd::Zero(embed_dim);
  for (int j = 0; j < embed_dim; ++j) {
    double acc = 0.0;
    for (int l = 0; l < dim; ++l) {
      acc += coef.sin_coef(j, l) * std::sin(kTwoPi * x[l]);
      acc += coef.cos_coef(j, l) * std::cos(kTwoPi * x[l]);
    }
    for (int l = 0; l + 1 < dim; ++l) acc += coef.cross_coef(j, l) * x[l] * x[l + 1];
    out[j] = acc;
  }
  return out;
}

MatrixXd true_embedding_batch(const EmbeddingCoefficients& coef, const MatrixXd& X) {
  require(X.cols() == coef.sin_coef.cols(), Errc::dimension_mismatch,
          "true_embedding_batch: point dimension != coefficient dimension");
  const MatrixXd S = (kTwoPi * X.array()).sin().matrix();
  const MatrixXd C = (kTwoPi * X.array()).cos().matrix();
  MatrixXd P(X.rows(), X.cols() - 1);
  for (Eigen::Index l = 0; l + 1 < X.cols(); ++l)
    P.col(l) = X.col(l).cwiseProduct(X.col(l + 1));
  return S * coef.sin_coef.transpose() + C * coef.cos_coef.transpose() +
         P * coef.cross_coef.transpose();
}

MatrixXd generate_covariates(std::int64_t count, int dim, int intrinsic, Rng& rng) {
  require(count > 0, Errc::invalid_argument, "generate_covariates: count must be positive");
  require(intrinsic >= 1 && intrinsic <= dim, Errc::invalid_argument,
          "generate_covariates: need 1 <= intrinsic <= dim");
  MatrixXd X(count, dim);
  for (std::int64_t r = 0; r < count; ++r)
    for (int j = 0; j < intrinsic; ++j) X(r, j) = rng.uniform01();
  for (int j = intrinsic; j < dim; ++j) X.col(j) = X.col(j - intrinsic);
  return X;
}

namespace {

// Floyd's algorithm: uniform k-subset of [0, n) without enumerating n cells.
std::vector<std::int64_t> sample_distinct(std::int64_t n, std::int64_t k, Rng& rng) {
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k) * 2);
  for (std::int64_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::int64_t>(
        rng.uniform_u64_below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::int64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SyntheticData generate_dataset(const SyntheticSpec& spec) {
  validate(spec);
  SyntheticData data;
  data.truth = draw_ground_truth(spec);

  Rng user_rng(derive_seed(spec.seed, kStreamUserCovariates));
  Rng item_rng(derive_seed(spec.seed, kStreamItemCovariates));
  MatrixXd user_X = generate_covariates(spec.n_users, spec.user_dim, spec.intrinsic_dim, user_rng);
  MatrixXd item_X = generate_covariates(spec.n_items, spec.item_dim, spec.intrinsic_dim, item_rng);

  const MatrixXd user_emb = true_embedding_batch(data.truth.user, user_X);
  const MatrixXd item_emb = true_embedding_batch(data.truth.item, item_X);

  // Pairs in sorted linear-index order; noise draws follow that order.
  Rng rating_rng(derive_seed(spec.seed, kStreamRatings));
  const std::vector<std::int64_t> cells =
      sample_distinct(spec.n_users * spec.n_items, spec.n_ratings, rating_rng);
  const double noise_sd = std::sqrt(spec.noise_var);

  data.observations.ratings.reserve(static_cast<std::size_t>(spec.n_ratings));
  for (const std::int64_t cell : cells) {
    const std::int64_t u = cell / spec.n_items;
    const std::int64_t i = cell % spec.n_items;
    double value = user_emb.row(u).dot(item_emb.row(i));
    if (noise_sd > 0.0) value += noise_sd * rating_rng.gaussian();
    data.observations.ratings.push_back({u, i, value});
  }

  std::vector<std::int64_t> user_ids(static_cast<std::size_t>(spec.n_users));
  std::vector<std::int64_t> item_ids(static_cast<std::size_t>(spec.n_items));
  for (std::int64_t u = 0; u < spec.n_users; ++u) user_ids[static_cast<std::size_t>(u)] = u;
  for (std::int64_t i = 0; i < spec.n_items; ++i) item_ids[static_cast<std::size_t>(i)] = i;
  data.observations.user_covariates =
      std::make_shared<data::CovariateTable>(std::move(user_ids), std::move(user_X));
  data.observations.item_covariates =
      std::make_shared<data::CovariateTable>(std::move(item_ids), std::move(item_X));
  return data;
}

namespace {

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& doc, const std::string& where) {
  require(doc.is_array() && !doc.empty() && doc[0].is_array(), Errc::config_parse,
          where + ": expected array of arrays");
  const auto rows = static_cast<Eigen::Index>(doc.size());
  const auto cols = static_cast<Eigen::Index>(doc[0].size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    require(static_cast<Eigen::Index>(doc[i].size()) == cols, Errc::config_parse,
            where + ": ragged rows");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = doc[i][j].get<double>();
  }
  return m;
}

json coefficients_to_json(const EmbeddingCoefficients& c) {
  return json{{"sin_coef", matrix_to_json(c.sin_coef)},
              {"cos_coef", matrix_to_json(c.cos_coef)},
              {"cross_coef", matrix_to_json(c.cross_coef)}};
}

EmbeddingCoefficients coefficients_from_json(const json& doc, const std::string& where) {
  require(doc.is_object() && doc.contains("sin_coef") && doc.contains("cos_coef") &&
              doc.contains("cross_coef"),
          Errc::config_parse, where + ": expected sin_coef/cos_coef/cross_coef");
  EmbeddingCoefficients c;
  c.sin_coef = matrix_from_json(doc["sin_coef"], where + ".sin_coef");
  c.cos_coef = matrix_from_json(doc["cos_coef"], where + ".cos_coef");
  c.cross_coef = matrix_from_json(doc["cross_coef"], where + ".cross_coef");
  require(c.cos_coef.rows() == c.sin_coef.rows() && c.cos_coef.cols() == c.sin_coef.cols() &&
              c.cross_coef.rows() == c.sin_coef.rows() &&
              c.cross_coef.cols() == c.sin_coef.cols() - 1,
          Errc::config_invalid, where + ": inconsistent coefficient shapes");
  return c;
}

}  // namespace

json ground_truth_to_json(const GroundTruth& truth) {
  return json{{"format_version", 1},
              {"user", coefficients_to_json(truth.user)},
              {"item", coefficients_to_json(truth.item)}};
}

GroundTruth ground_truth_from_json(const json& doc) {
  require(doc.is_object() && doc.contains("user") && doc.contains("item"), Errc::config_parse,
          "ground truth document: expected user and item coefficient sets");
  GroundTruth gt;
  gt.user = coefficients_from_json(doc["user"], "user");
  gt.item = coefficients_from_json(doc["item"], "item");
  return gt;
}

}  // namespace ttrec::synth
