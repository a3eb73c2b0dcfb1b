// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark comparing the OpenMP-parallel kernels against their serial
// reference implementations. Prints one line per kernel with both timings,
// the speedup, and the largest numeric disagreement, so a parallelism
// regression shows up as either a slowdown or a nonzero difference.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ttrec/parallel.hpp"
#include "ttrec/rng.hpp"
#include "ttrec/theory/boxdim.hpp"
#include "ttrec/twotower/model.hpp"

namespace {

using namespace ttrec;
using Clock = std::chrono::steady_clock;

double seconds_of(const std::function<void()>& fn, int repeats) {
  const auto start = Clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const std::chrono::duration<double> dt = Clock::now() - start;
  return dt.count() / repeats;
}

void report(const char* name, double serial_s, double parallel_s, double max_diff) {
  std::printf("%-28s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   max diff %.3e\n",
              name, serial_s, parallel_s, serial_s / parallel_s, max_diff);
}

double grad_max_diff(const twotower::BatchGradient& a, const twotower::BatchGradient& b) {
  double diff = std::abs(a.mse - b.mse);
  const auto side = [&diff](const nn::MlpGrad& x, const nn::MlpGrad& y) {
    for (std::size_t l = 0; l < x.weights.size(); ++l) {
      diff = std::max(diff, (x.weights[l] - y.weights[l]).cwiseAbs().maxCoeff());
      diff = std::max(diff, (x.bias[l] - y.bias[l]).cwiseAbs().maxCoeff());
    }
  };
  side(a.grad.user, b.grad.user);
  side(a.grad.item, b.grad.item);
  return diff;
}

void bench_objective_gradient() {
  const int user_dim = 50;
  const int item_dim = 50;
  const int batch_size = 4096;
  twotower::TwoTowerModel model = twotower::make_towers(
      user_dim, item_dim, 30, {50, 50, 50, 50}, nn::Activation::relu, 1);

  Rng rng(derive_seed(2, 0));
  twotower::PairBatch batch;
  batch.user_inputs.resize(batch_size, user_dim);
  batch.item_inputs.resize(batch_size, item_dim);
  batch.targets.resize(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    for (int j = 0; j < user_dim; ++j) batch.user_inputs(b, j) = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < item_dim; ++j) batch.item_inputs(b, j) = rng.uniform(-1.0, 1.0);
    batch.targets(b) = rng.gaussian();
  }
  const double lambda = 1e-4;

  const twotower::BatchGradient ref = twotower::serial::objective_gradient(model, batch, lambda);
  const twotower::BatchGradient fast = twotower::objective_gradient(model, batch, lambda);

  const double serial_s = seconds_of(
      [&] { twotower::serial::objective_gradient(model, batch, lambda); }, 3);
  const double parallel_s =
      seconds_of([&] { twotower::objective_gradient(model, batch, lambda); }, 3);
  report("two-tower gradient", serial_s, parallel_s, grad_max_diff(ref, fast));
}

void bench_box_counting() {
  const int points = 200000;
  const int dim = 20;
  Rng rng(derive_seed(3, 0));
  Eigen::MatrixXd cloud(points, dim);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < dim; ++j) cloud(i, j) = rng.uniform01();
  const auto& scales = theory::default_scales();

  const theory::BoxCountReport ref = theory::minkowski_dimension(cloud, scales, true);
  const theory::BoxCountReport fast = theory::minkowski_dimension(cloud, scales, false);
  double diff = std::abs(ref.dimension - fast.dimension);
  for (std::size_t s = 0; s < scales.size(); ++s)
    diff = std::max(diff, static_cast<double>(std::abs(ref.counts[s] - fast.counts[s])));

  const double serial_s =
      seconds_of([&] { theory::minkowski_dimension(cloud, scales, true); }, 3);
  const double parallel_s =
      seconds_of([&] { theory::minkowski_dimension(cloud, scales, false); }, 3);
  report("box-counting dimension", serial_s, parallel_s, diff);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) set_threads(std::max(1, std::atoi(argv[1])));
  std::printf("threads: %d\n", max_threads());
  bench_objective_gradient();
  bench_box_counting();
  return 0;
}
