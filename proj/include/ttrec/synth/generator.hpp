// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic benchmark generator. Ground-truth embeddings are trigonometric
// polynomials with a quadratic cross term; covariates live on a d-dimensional
// manifold embedded in D dimensions by coordinate replication; ratings are
// inner products of the true embeddings plus gaussian noise on a uniformly
// sampled set of distinct (user, item) pairs.

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include <json.hpp>

#include "ttrec/data/observations.hpp"
#include "ttrec/rng.hpp"

namespace ttrec::synth {

struct SyntheticSpec {
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;
  int user_dim = 50;        // ambient covariate dimension, user side
  int item_dim = 50;        // ambient covariate dimension, item side
  int embed_dim = 30;       // ground-truth embedding dimension
  int intrinsic_dim = 20;   // free covariate coordinates; the rest replicate
  std::int64_t n_ratings = 0;
  double noise_var = 0.1;
  double coeff_range = 0.15;  // coefficients are iid uniform on [-range, range]
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

// One side's coefficient set: rows are embedding coordinates.
struct EmbeddingCoefficients {
  Eigen::MatrixXd sin_coef;    // embed_dim x dim
  Eigen::MatrixXd cos_coef;    // embed_dim x dim
  Eigen::MatrixXd cross_coef;  // embed_dim x (dim - 1)
};

struct GroundTruth {
  EmbeddingCoefficients user;
  EmbeddingCoefficients item;
};

// Subordinate seed streams (derive_seed(spec.seed, stream)).
inline constexpr std::uint64_t kStreamGroundTruth = 1;
inline constexpr std::uint64_t kStreamUserCovariates = 2;
inline constexpr std::uint64_t kStreamItemCovariates = 3;
inline constexpr std::uint64_t kStreamRatings = 4;

GroundTruth draw_ground_truth(const SyntheticSpec& spec);

// j-th output: sum_l sin_coef(j,l) sin(2 pi x_l) + cos_coef(j,l) cos(2 pi x_l)
//              + sum_{l<dim-1} cross_coef(j,l) x_l x_{l+1}
Eigen::VectorXd true_embedding(const EmbeddingCoefficients& coef, const Eigen::VectorXd& x);

// Batched form: rows of X are points, rows of the result are embeddings.
Eigen::MatrixXd true_embedding_batch(const EmbeddingCoefficients& coef, const Eigen::MatrixXd& X);

// count x dim matrix: first `intrinsic` columns iid uniform [0,1), then
// column j replicates column j - intrinsic.
Eigen::MatrixXd generate_covariates(std::int64_t count, int dim, int intrinsic, Rng& rng);

struct SyntheticData {
  data::ObservationSet observations;
  GroundTruth truth;
};

// Full pipeline: ground truth, covariates, distinct uniform (user, item)
// pairs, noisy ratings. Deterministic in spec.seed.
SyntheticData generate_dataset(const SyntheticSpec& spec);

nlohmann::json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& doc);

}  // namespace ttrec::synth
