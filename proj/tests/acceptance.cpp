// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Release gate: nine numbered checks covering the gradient oracle, the depth
// embedding, the perturbation bound, the closed-form calculators, the
// box-counting estimator, the desk-scale method comparison, the empirical
// rate probe, baseline sanity, and byte-level determinism of the command
// line. Prints one PASS/FAIL line per check with timings and exits with the
// number of failures. Tolerances and seeds are pinned here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "ttrec/baselines/cocluster.hpp"
#include "ttrec/baselines/knn.hpp"
#include "ttrec/baselines/mf.hpp"
#include "ttrec/data/observations.hpp"
#include "ttrec/harness/experiment.hpp"
#include "ttrec/io/fileio.hpp"
#include "ttrec/nn/mlp.hpp"
#include "ttrec/rng.hpp"
#include "ttrec/synth/generator.hpp"
#include "ttrec/theory/boxdim.hpp"
#include "ttrec/theory/calculators.hpp"
#include "ttrec/theory/embedding.hpp"
#include "ttrec/theory/lipschitz.hpp"
#include "ttrec/theory/rate_probe.hpp"

namespace {

using namespace ttrec;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Gradient oracle: analytic backward pass vs central finite differences,
//    every parameter entry of 100 random three- and four-layer nets.
// ---------------------------------------------------------------------------
Outcome check_gradient_oracle() {
  const int nets = 100;
  const double h = 1e-5;
  double worst = 0.0;
  std::int64_t entries = 0;
  int violations = 0;
  for (int n = 0; n < nets; ++n) {
    Rng rng(derive_seed(101, static_cast<std::uint64_t>(n)));
    const int depth = 3 + (n % 2);
    std::vector<int> dims;
    for (int l = 0; l <= depth; ++l) dims.push_back(2 + static_cast<int>(rng.uniform_u64_below(4)));
    // Sigmoid keeps the map smooth, so the central difference quotient is a
    // clean oracle; piecewise-linear activations would poison it at kinks.
    nn::Mlp net = nn::glorot_init(dims, nn::Activation::sigmoid, rng);

    Eigen::VectorXd x(dims.front());
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd upstream(dims.back());
    for (Eigen::Index j = 0; j < upstream.size(); ++j) upstream(j) = rng.gaussian();

    const nn::MlpGrad analytic = nn::backward(net, x, upstream);
    const auto value = [&] { return upstream.dot(nn::forward(net, x)); };
    const auto fd_entry = [&](double* param, double grad) {
      const double saved = *param;
      *param = saved + h;
      const double up = value();
      *param = saved - h;
      const double down = value();
      *param = saved;
      const double fd = (up - down) / (2.0 * h);
      const double err = std::abs(fd - grad);
      const double allowed = std::max(1e-8, 1e-5 * std::max(std::abs(fd), std::abs(grad)));
      worst = std::max(worst, err / allowed);
      if (err > allowed) ++violations;
      ++entries;
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      auto& layer = net.layers[l];
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
          fd_entry(&layer.weights(r, c), analytic.weights[l](r, c));
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
        fd_entry(&layer.bias(r), analytic.bias[l](r));
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(nets) + " nets, " + std::to_string(entries) +
               " gradient entries, " + std::to_string(violations) +
               " outside 1e-5 rel / 1e-8 abs, worst error at " +
               io::format_double(worst) + "x the allowance";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Depth embedding: the deepened network reproduces the original map and
//    stays within the 14 L W log W effective-parameter budget.
// ---------------------------------------------------------------------------
Outcome check_depth_embedding() {
  const int nets = 50;
  const int inputs = 1000;
  double worst_dev = 0.0;
  int dev_violations = 0;
  int budget_violations = 0;
  for (int n = 0; n < nets; ++n) {
    Rng rng(derive_seed(202, static_cast<std::uint64_t>(n)));
    const int input = 1 + static_cast<int>(rng.uniform_u64_below(4));
    const int layers = 1 + static_cast<int>(rng.uniform_u64_below(3));
    std::vector<int> dims{input};
    for (int l = 0; l < layers; ++l) dims.push_back(1 + static_cast<int>(rng.uniform_u64_below(5)));
    nn::Mlp net = nn::glorot_init(dims, nn::Activation::relu, rng);

    // Gap 0 is same depth, gap 1 one below target, gaps 2 and 3 the deeper
    // extension case.
    const int gap = n % 4;
    const int target_depth = net.depth() + gap;
    const int cap =
        std::max<int>(2, static_cast<int>(nn::arch_stats(net).effective_params));
    const nn::Mlp embedded = theory::embed_network(net, target_depth, cap);

    for (int t = 0; t < inputs; ++t) {
      Eigen::VectorXd x(input);
      for (int j = 0; j < input; ++j) x(j) = rng.uniform(-2.0, 2.0);
      const double dev = (nn::forward(net, x) - nn::forward(embedded, x)).cwiseAbs().maxCoeff();
      worst_dev = std::max(worst_dev, dev);
      if (dev > 1e-10) ++dev_violations;
    }
    const double budget = theory::embedding_budget(target_depth, cap);
    if (static_cast<double>(nn::arch_stats(embedded).effective_params) > budget)
      ++budget_violations;
  }
  Outcome out;
  out.pass = dev_violations == 0 && budget_violations == 0;
  out.detail = std::to_string(nets) + " nets x " + std::to_string(inputs) +
               " inputs, max output deviation " + io::format_double(worst_dev) +
               " (cap 1e-10), " + std::to_string(budget_violations) +
               " parameter budget violations";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Parameter perturbation bound: 500 random perturbations per (W, L, B)
//    configuration with W*B > 1 never move the output past p*C(W,L,B)*eps.
// ---------------------------------------------------------------------------
Outcome check_perturbation_bound() {
  const int trials = 500;
  const double eps = 1e-3;
  int configs = 0;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int width : {2, 4, 8}) {
    for (int depth : {1, 2, 3}) {
      for (double bound : {1.0, 2.0}) {
        theory::LipschitzFamily family;
        family.input_dim = width;
        family.width = width;
        family.depth = depth;
        family.B = bound;
        family.p = 2;
        const theory::LipschitzReport rep = theory::verify_lipschitz(
            family, eps, trials, derive_seed(303, static_cast<std::uint64_t>(configs)));
        violations += rep.violations;
        worst_ratio = std::max(worst_ratio, rep.max_ratio);
        ++configs;
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(configs) + " configurations x " + std::to_string(trials) +
               " perturbations, " + std::to_string(violations) +
               " bound violations, max observed/bound ratio " + io::format_double(worst_ratio);
  return out;
}

// ---------------------------------------------------------------------------
// 4. Calculator exactness at hand-derived points, absolute tolerance 1e-12.
// ---------------------------------------------------------------------------
Outcome check_calculators() {
  const double tol = 1e-12;
  std::string errors;
  const auto expect = [&errors, tol](const char* name, double got, double want) {
    if (std::abs(got - want) > tol)
      errors += std::string(errors.empty() ? "" : "; ") + name + " = " +
                io::format_double(got) + ", want " + io::format_double(want);
  };

  expect("lipschitz_constant(2,2,1)", theory::lipschitz_constant(2, 2, 1.0), 13.0);

  theory::BoundInputs in;
  in.W = 5;
  in.L = 5;
  in.B = 2.0;
  in.W_tilde = 5;
  in.L_tilde = 5;
  in.B_tilde = 2.0;
  in.p = 4;
  in.M = 1.0;
  in.beta = 2.0;
  in.d_u = 4;
  in.d_i = 4;
  in.omega_size = 10000;
  in.sigma2 = 0.1;
  in.B_e = 1.0;
  in.lambda_omega = 1e-4;
  in.J_R0 = 1.0;
  const theory::BoundReport rep = theory::rate_report(in);
  expect("C2 at L = L~ = 5", rep.C2, 140.0);
  expect("C3 at p=4, M=1, B=2", rep.C3, 32.0);
  expect("rate_exponent at beta=2, d_ui=4", rep.rate_exponent, 0.5);
  expect("approx_bound(30, 1, 0.01)", theory::approx_bound(30, 1.0, 0.01), 0.9);

  Outcome out;
  out.pass = errors.empty();
  out.detail = errors.empty() ? "all five closed-form values exact to 1e-12" : errors;
  return out;
}

// ---------------------------------------------------------------------------
// 5. Box-counting estimator: a line segment reads as dimension one, a
//    repeated point as exactly zero, and the synthetic covariate cloud
//    (intrinsic dimension 20 inside 50 coordinates, 10^4 rows) should read
//    within 15% of 20.
// ---------------------------------------------------------------------------
Outcome check_box_counting() {
  std::string errors;

  Rng rng(derive_seed(404, 0));
  Eigen::MatrixXd segment(10000, 2);
  for (int i = 0; i < segment.rows(); ++i) {
    const double t = rng.uniform01();
    segment(i, 0) = t;
    segment(i, 1) = 0.25 + 0.5 * t;
  }
  const double seg_dim =
      theory::minkowski_dimension(segment, theory::default_scales()).dimension;
  if (seg_dim < 0.9 || seg_dim > 1.1)
    errors += "segment estimate " + io::format_double(seg_dim) + " outside [0.9, 1.1]";

  Eigen::MatrixXd repeated(200, 2);
  repeated.col(0).setConstant(0.4);
  repeated.col(1).setConstant(0.6);
  const double point_dim =
      theory::minkowski_dimension(repeated, theory::default_scales()).dimension;
  if (point_dim != 0.0)
    errors += std::string(errors.empty() ? "" : "; ") + "repeated point estimate " +
              io::format_double(point_dim) + ", want exactly 0";

  synth::SyntheticSpec spec;
  spec.n_users = 10000;
  spec.n_items = 10;
  spec.user_dim = 50;
  spec.item_dim = 50;
  spec.intrinsic_dim = 20;
  spec.n_ratings = 10;
  spec.seed = 404;
  const synth::SyntheticData data = synth::generate_dataset(spec);
  const double cloud_dim =
      theory::minkowski_dimension(data.observations.user_covariates->rows(),
                                  theory::default_scales())
          .dimension;
  if (cloud_dim < 17.0 || cloud_dim > 23.0)
    errors += std::string(errors.empty() ? "" : "; ") + "covariate cloud estimate " +
              io::format_double(cloud_dim) +
              " outside [17, 23]: 10^4 points cannot populate a 20-dimensional manifold at "
              "scales 1/4 .. 1/128 (that takes 4^20 boxes), so the count saturates at one box "
              "per point and the fitted slope collapses; no point count below ~4^20 reaches "
              "the target band at these scales";

  Outcome out;
  out.pass = errors.empty();
  out.detail = errors.empty()
                   ? "segment " + io::format_double(seg_dim) + ", repeated point 0, cloud " +
                         io::format_double(cloud_dim)
                   : errors;
  return out;
}

// ---------------------------------------------------------------------------
// 6. Desk-scale method comparison: 300x300 matrix, 10k ratings, noise 0.1,
//    10 replications, intrinsic dimensions {20, 30, 40}.
// ---------------------------------------------------------------------------
Outcome check_desk_trend() {
  harness::ExperimentConfig cfg;
  cfg.spec.n_ratings = 10000;
  cfg.spec.noise_var = 0.1;
  cfg.replications = 10;
  cfg.base_seed = 2026;
  // One regularization point per decade keeps the tuned-method cost inside
  // the runtime budget; the stall-free grid span is unchanged.
  cfg.lambda_grid.clear();
  for (int k = -6; k <= 2; ++k) cfg.lambda_grid.push_back(std::pow(10.0, k));
  const std::vector<harness::Scenario> scenarios{{300, 300, 20}, {300, 300, 30}, {300, 300, 40}};

  const harness::ResultTable rows = harness::run_sweep(cfg, scenarios);
  std::printf("%s", harness::result_text(rows).c_str());

  const auto mean_of = [&rows](int d, harness::Method m) {
    for (const auto& row : rows)
      if (row.intrinsic_dim == d && row.method == m) return row.rmse_mean;
    return std::numeric_limits<double>::quiet_NaN();
  };

  std::string errors;
  const double floor = 0.95 * std::sqrt(0.1);
  std::vector<double> t2rec_means;
  for (int d : {20, 30, 40}) {
    const double t2rec = mean_of(d, harness::Method::t2rec);
    t2rec_means.push_back(t2rec);
    for (const harness::Method m :
         {harness::Method::rsvd, harness::Method::svdpp, harness::Method::cocluster,
          harness::Method::knn}) {
      const double other = mean_of(d, m);
      if (!(t2rec < other))
        errors += std::string(errors.empty() ? "" : "; ") + "at d=" + std::to_string(d) +
                  " t2rec " + io::format_double(t2rec) + " is not below " +
                  harness::method_name(m) + " " + io::format_double(other);
    }
    for (const auto& row : rows) {
      if (row.intrinsic_dim != d) continue;
      if (!(row.rmse_mean >= floor))
        errors += std::string(errors.empty() ? "" : "; ") +
                  std::string(harness::method_name(row.method)) + " at d=" + std::to_string(d) +
                  " mean " + io::format_double(row.rmse_mean) + " below the noise floor " +
                  io::format_double(floor);
      if (row.failures > 0)
        errors += std::string(errors.empty() ? "" : "; ") +
                  std::string(harness::method_name(row.method)) + " at d=" + std::to_string(d) +
                  " had " + std::to_string(row.failures) + " failed replications";
    }
  }
  if (!(t2rec_means[0] <= t2rec_means[1] && t2rec_means[1] <= t2rec_means[2]))
    errors += std::string(errors.empty() ? "" : "; ") + "t2rec means not non-decreasing in d: " +
              io::format_double(t2rec_means[0]) + ", " + io::format_double(t2rec_means[1]) +
              ", " + io::format_double(t2rec_means[2]);

  Outcome out;
  out.pass = errors.empty();
  out.detail = errors.empty() ? "ranking, monotonicity in d, and noise floor all hold" : errors;
  return out;
}

// ---------------------------------------------------------------------------
// 7. Rate probe: excess test MSE falls with the observation count, faster at
//    the lower intrinsic dimension.
// ---------------------------------------------------------------------------
Outcome check_rate_probe() {
  theory::RateProbeConfig cfg;
  cfg.spec.n_users = 300;
  cfg.spec.n_items = 300;
  cfg.spec.noise_var = 0.1;
  // The d=40 slope is small (about -0.07) and flips sign under per-cell noise
  // at a handful of replications; twenty keeps the fit stable at roughly a
  // quarter of the runtime budget.
  cfg.replications = 20;
  cfg.base_seed = 2027;
  const std::vector<theory::RateSlopeRow> rows = theory::empirical_rate_experiment(cfg);

  double slope20 = 0.0;
  double slope40 = 0.0;
  std::string errors;
  for (const auto& row : rows) {
    if (row.degenerate) {
      errors += std::string(errors.empty() ? "" : "; ") + "d=" +
                std::to_string(row.intrinsic_dim) + " excess MSE degenerate";
      continue;
    }
    if (row.intrinsic_dim == 20) slope20 = row.slope;
    if (row.intrinsic_dim == 40) slope40 = row.slope;
    if (!(row.slope < 0.0))
      errors += std::string(errors.empty() ? "" : "; ") + "slope at d=" +
                std::to_string(row.intrinsic_dim) + " is " + io::format_double(row.slope) +
                ", not negative";
  }
  if (!(slope20 <= slope40 + 0.1))
    errors += std::string(errors.empty() ? "" : "; ") + "slope(d=20) " +
              io::format_double(slope20) + " exceeds slope(d=40) + 0.1 = " +
              io::format_double(slope40 + 0.1);

  Outcome out;
  out.pass = errors.empty();
  out.detail = errors.empty() ? "slopes " + io::format_double(slope20) + " (d=20) and " +
                                    io::format_double(slope40) + " (d=40), ordering holds"
                              : errors;
  return out;
}

// ---------------------------------------------------------------------------
// 8. Baseline sanity: ALS and co-clustering objectives are monotone, KNN
//    matches a brute-force neighbor scan, and rank-1 data is recovered.
// ---------------------------------------------------------------------------
data::ObservationSet random_ratings(Rng& rng, std::int64_t n_users, std::int64_t n_items,
                                    int count) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::int64_t u = 0; u < n_users; ++u)
    for (std::int64_t i = 0; i < n_items; ++i) pairs.push_back({u, i});
  rng.shuffle(pairs);
  data::ObservationSet obs;
  for (int t = 0; t < count; ++t)
    obs.ratings.push_back({pairs[static_cast<std::size_t>(t)].first,
                           pairs[static_cast<std::size_t>(t)].second, rng.gaussian()});
  return obs;
}

// Plainest-possible KNN prediction: mean-squared-difference similarity over
// co-rated entries, top-k weighted average, ties broken by smaller id,
// global mean when no linked neighbor exists.
double brute_force_knn(const data::ObservationSet& data, bool user_based, int k,
                       std::int64_t user, std::int64_t item) {
  const std::int64_t agent = user_based ? user : item;
  const std::int64_t target = user_based ? item : user;
  const auto of_agent = [user_based](const data::Rating& r) {
    return user_based ? r.user : r.item;
  };
  const auto of_other = [user_based](const data::Rating& r) {
    return user_based ? r.item : r.user;
  };

  std::vector<std::int64_t> others;
  double global = 0.0;
  for (const auto& r : data.ratings) {
    others.push_back(of_agent(r));
    global += r.value;
  }
  global /= static_cast<double>(data.ratings.size());
  std::sort(others.begin(), others.end());
  others.erase(std::unique(others.begin(), others.end()), others.end());

  struct Cand {
    double sim;
    std::int64_t id;
    double rating;
  };
  std::vector<Cand> cands;
  for (const std::int64_t v : others) {
    if (v == agent) continue;
    bool has_target = false;
    double rated_target = 0.0;
    double sum = 0.0;
    int common = 0;
    for (const auto& ra : data.ratings) {
      if (of_agent(ra) == v && of_other(ra) == target) {
        has_target = true;
        rated_target = ra.value;
      }
      if (of_agent(ra) != agent) continue;
      for (const auto& rb : data.ratings) {
        if (of_agent(rb) == v && of_other(rb) == of_other(ra)) {
          const double d = ra.value - rb.value;
          sum += d * d;
          ++common;
        }
      }
    }
    if (!has_target || common == 0) continue;
    cands.push_back({1.0 / (sum / common + 1.0), v, rated_target});
  }
  if (cands.empty()) return global;
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.id < b.id;
  });
  double wsum = 0.0;
  double vsum = 0.0;
  for (std::size_t t = 0; t < std::min<std::size_t>(cands.size(), static_cast<std::size_t>(k));
       ++t) {
    wsum += cands[t].sim;
    vsum += cands[t].sim * cands[t].rating;
  }
  return vsum / wsum;
}

Outcome check_baseline_sanity() {
  std::string errors;

  // ALS objective traces, 50 random instances.
  int als_breaks = 0;
  for (int n = 0; n < 50; ++n) {
    Rng rng(derive_seed(505, static_cast<std::uint64_t>(n)));
    const auto data = random_ratings(rng, 8 + n % 5, 6 + n % 7, 30 + n % 11);
    const auto model =
        baselines::fit_rsvd(data, 2 + n % 3, 0.1, 8, derive_seed(505, 1000 + n));
    for (std::size_t t = 1; t < model.objective_trace.size(); ++t)
      if (model.objective_trace[t] > model.objective_trace[t - 1] + 1e-9) ++als_breaks;
  }
  if (als_breaks > 0)
    errors += "ALS objective rose " + std::to_string(als_breaks) + " times across 50 instances";

  // Co-clustering SSE traces on the same family of instances.
  int sse_breaks = 0;
  for (int n = 0; n < 50; ++n) {
    Rng rng(derive_seed(606, static_cast<std::uint64_t>(n)));
    const auto data = random_ratings(rng, 8 + n % 5, 6 + n % 7, 30 + n % 11);
    const auto model =
        baselines::fit_cocluster(data, 2, 2, 10, derive_seed(606, 1000 + n));
    for (std::size_t t = 1; t < model.sse_trace.size(); ++t)
      if (model.sse_trace[t] > model.sse_trace[t - 1] + 1e-9) ++sse_breaks;
  }
  if (sse_breaks > 0)
    errors += std::string(errors.empty() ? "" : "; ") + "co-clustering SSE rose " +
              std::to_string(sse_breaks) + " times across 50 instances";

  // KNN vs the brute-force scan on an 8-user toy, both orientations.
  int knn_mismatches = 0;
  double knn_worst = 0.0;
  {
    Rng rng(derive_seed(707, 0));
    const auto data = random_ratings(rng, 8, 6, 28);
    for (const bool user_based : {true, false}) {
      const auto model = baselines::fit_knn(
          data, user_based ? baselines::KnnMode::user_based : baselines::KnnMode::item_based, 3);
      for (std::int64_t u = 0; u < 8; ++u) {
        for (std::int64_t i = 0; i < 6; ++i) {
          const double want = brute_force_knn(data, user_based, 3, u, i);
          const double got = baselines::predict_knn(model, u, i).value;
          const double err = std::abs(got - want);
          knn_worst = std::max(knn_worst, err);
          if (err > 1e-12 * std::max(1.0, std::abs(want))) ++knn_mismatches;
        }
      }
    }
  }
  if (knn_mismatches > 0)
    errors += std::string(errors.empty() ? "" : "; ") + "KNN differed from the brute-force scan " +
              std::to_string(knn_mismatches) + " times (worst " + io::format_double(knn_worst) +
              ")";

  // Rank-1 exact recovery on a fully observed 10x10 matrix.
  {
    Rng rng(derive_seed(808, 0));
    Eigen::VectorXd u(10);
    Eigen::VectorXd v(10);
    for (int j = 0; j < 10; ++j) {
      u(j) = rng.uniform(0.5, 1.5);
      v(j) = rng.uniform(-1.5, -0.5);
    }
    data::ObservationSet obs;
    for (std::int64_t a = 0; a < 10; ++a)
      for (std::int64_t b = 0; b < 10; ++b) obs.ratings.push_back({a, b, u(a) * v(b)});
    const auto model = baselines::fit_rsvd(obs, 1, 1e-9, 40, derive_seed(808, 1));
    double sse = 0.0;
    for (const auto& r : obs.ratings) {
      const double err = baselines::predict_mf(model, r.user, r.item) - r.value;
      sse += err * err;
    }
    const double rmse = std::sqrt(sse / static_cast<double>(obs.ratings.size()));
    if (!(rmse < 1e-3))
      errors += std::string(errors.empty() ? "" : "; ") + "rank-1 recovery RMSE " +
                io::format_double(rmse) + " not below 1e-3";
  }

  Outcome out;
  out.pass = errors.empty();
  out.detail = errors.empty()
                   ? "ALS and co-clustering traces monotone, KNN matches the scan, rank-1 "
                     "recovered"
                   : errors;
  return out;
}

// ---------------------------------------------------------------------------
// 9. Determinism through the command line: generation outputs and training
//    histories byte-identical across repeated runs of the same config.
// ---------------------------------------------------------------------------
int run_cli(const std::string& args, const fs::path& log_dir) {
  const std::string cmd = std::string(TTREC_CLI_PATH) + " " + args + " >" +
                          (log_dir / "stdout.txt").string() + " 2>" +
                          (log_dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome check_cli_determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("ttrec_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string errors;

  const std::string gen_config =
      "{\"n_users\": 50, \"n_items\": 50, \"intrinsic_dim\": 10, \"n_ratings\": 400,\n"
      " \"noise_var\": 0.1, \"seed\": 12}\n";
  io::atomic_write_text_file((dir / "gen.json").string(), gen_config);
  const std::string train_config =
      "{\"ratings\": \"g1/ratings.csv\", \"user_covariates\": \"g1/user_covariates.csv\",\n"
      " \"item_covariates\": \"g1/item_covariates.csv\",\n"
      " \"t2rec\": {\"hidden\": [8], \"embed_dim\": 4, \"seed\": 3,\n"
      "            \"train\": {\"lambda\": 1e-4, \"max_epochs\": 12, \"seed\": 3}}}\n";
  io::atomic_write_text_file((dir / "train.json").string(), train_config);

  for (const char* out : {"g1", "g2"})
    if (run_cli("gen --config " + (dir / "gen.json").string() + " --out " +
                    (dir / out).string(),
                dir) != 0)
      errors += std::string(errors.empty() ? "" : "; ") + "gen run into " + out + " failed";
  if (errors.empty()) {
    for (const char* name :
         {"ratings.csv", "user_covariates.csv", "item_covariates.csv", "ground_truth.json"}) {
      if (io::read_text_file((dir / "g1" / name).string()) !=
          io::read_text_file((dir / "g2" / name).string()))
        errors += std::string(errors.empty() ? "" : "; ") + name + " differs between gen runs";
    }
  }

  if (errors.empty()) {
    for (const char* out : {"t1", "t2"})
      if (run_cli("train --config " + (dir / "train.json").string() + " --out " +
                      (dir / out).string(),
                  dir) != 0)
        errors += std::string(errors.empty() ? "" : "; ") + "train run into " + out + " failed";
  }
  if (errors.empty()) {
    if (io::read_text_file((dir / "t1" / "history.csv").string()) !=
        io::read_text_file((dir / "t2" / "history.csv").string()))
      errors += std::string(errors.empty() ? "" : "; ") + "history.csv differs between train runs";
    if (io::read_text_file((dir / "t1" / "model.json").string()) !=
        io::read_text_file((dir / "t2" / "model.json").string()))
      errors += std::string(errors.empty() ? "" : "; ") + "model.json differs between train runs";
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
  Outcome out;
  out.pass = errors.empty();
  out.detail = errors.empty()
                   ? "generation outputs and training histories byte-identical across reruns"
                   : errors;
  return out;
}

struct Criterion {
  const char* name;
  double limit_seconds;
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"gradient oracle", 60.0, check_gradient_oracle},
      {"depth embedding", 60.0, check_depth_embedding},
      {"perturbation bound", 120.0, check_perturbation_bound},
      {"calculator exactness", 60.0, check_calculators},
      {"box-counting dimension", 120.0, check_box_counting},
      {"desk-scale method trend", 1800.0, check_desk_trend},
      {"empirical rate probe", 2700.0, check_rate_probe},
      {"baseline sanity", 120.0, check_baseline_sanity},
      {"command-line determinism", 600.0, check_cli_determinism},
  };

  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[c].run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const bool in_budget = elapsed.count() < criteria[c].limit_seconds;
    const bool pass = outcome.pass && in_budget;
    if (!pass) ++failures;
    std::printf("criterion %zu (%s): %s - %s (%.1f s%s)\n", c + 1, criteria[c].name,
                pass ? "PASS" : "FAIL", outcome.detail.c_str(), elapsed.count(),
                in_budget ? "" : ", over the runtime budget");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
