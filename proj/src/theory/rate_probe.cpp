// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/theory/rate_probe.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "ttrec/error.hpp"
#include "ttrec/parallel.hpp"

namespace ttrec::theory {

void validate(const RateProbeConfig& cfg) {
  require(!cfg.intrinsic_dims.empty(), Errc::config_invalid,
          "rate probe: no intrinsic dimensions requested");
  for (int d : cfg.intrinsic_dims)
    require(d > 0, Errc::config_invalid, "rate probe: intrinsic dimensions must be positive");
  require(cfg.omega_grid.size() >= 4, Errc::config_invalid,
          "rate probe: omega_grid needs at least 4 points");
  for (std::size_t i = 0; i < cfg.omega_grid.size(); ++i) {
    require(cfg.omega_grid[i] > 0, Errc::config_invalid,
            "rate probe: omega_grid values must be positive");
    require(i == 0 || cfg.omega_grid[i] > cfg.omega_grid[i - 1], Errc::config_invalid,
            "rate probe: omega_grid must be strictly increasing");
  }
  require(cfg.replications >= 1, Errc::config_invalid,
          "rate probe: replications must be at least 1");
  require(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0, Errc::config_invalid,
          "rate probe: split_ratio must lie strictly between 0 and 1");
  require(std::isfinite(cfg.lambda) && cfg.lambda >= 0.0, Errc::config_invalid,
          "rate probe: lambda must be finite and non-negative");
  require(cfg.degenerate_tol >= 0.0, Errc::config_invalid,
          "rate probe: degenerate_tol must be non-negative");
  harness::validate(cfg.t2rec);
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<RateSlopeRow> empirical_rate_experiment(const RateProbeConfig& cfg,
                                                    const harness::T2RecTrainer& trainer) {
  validate(cfg);
  const std::size_t n_dims = cfg.intrinsic_dims.size();
  const std::size_t n_omega = cfg.omega_grid.size();
  const auto n_reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t n_cells = n_dims * n_omega * n_reps;

  struct CellFailure {
    Errc code = Errc::internal;
    std::string what;
  };
  std::vector<double> excess(n_cells, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::optional<CellFailure>> failed(n_cells);

  parallel_for_dynamic(static_cast<std::int64_t>(n_cells), [&](std::int64_t c) {
    const auto cell = static_cast<std::size_t>(c);
    const std::size_t di = cell / (n_omega * n_reps);
    const std::size_t oi = (cell / n_reps) % n_omega;
    const std::uint64_t cell_seed = cfg.base_seed + static_cast<std::uint64_t>(cell);
    try {
      synth::SyntheticSpec spec = cfg.spec;
      spec.intrinsic_dim = cfg.intrinsic_dims[di];
      spec.n_ratings = cfg.omega_grid[oi];
      spec.seed = cell_seed;
      const synth::SyntheticData data = synth::generate_dataset(spec);
      const harness::SplitResult parts =
          harness::split(data.observations, cfg.split_ratio, cell_seed);
      harness::T2RecSettings settings = cfg.t2rec;
      settings.seed = cell_seed;
      const harness::T2RecTuneResult tuned =
          harness::tune_t2rec(parts.train, {cfg.lambda}, settings, trainer);
      const double rmse = harness::evaluate_t2rec_rmse(tuned.train_result.model, parts.test);
      excess[cell] = rmse * rmse - spec.noise_var;
    } catch (const Error& e) {
      failed[cell] = CellFailure{e.code(), e.what()};
    } catch (const std::exception& e) {
      failed[cell] = CellFailure{Errc::internal, e.what()};
    }
  });

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (!failed[cell]) continue;
    const std::size_t di = cell / (n_omega * n_reps);
    const std::size_t oi = (cell / n_reps) % n_omega;
    const std::size_t rep = cell % n_reps;
    fail(failed[cell]->code,
         "rate probe cell (d=" + std::to_string(cfg.intrinsic_dims[di]) +
             ", omega=" + std::to_string(cfg.omega_grid[oi]) +
             ", replication " + std::to_string(rep) + "): " + failed[cell]->what);
  }

  std::vector<RateSlopeRow> rows;
  rows.reserve(n_dims);
  for (std::size_t di = 0; di < n_dims; ++di) {
    RateSlopeRow row;
    row.intrinsic_dim = cfg.intrinsic_dims[di];
    row.cells.reserve(n_omega);
    bool defined = true;
    std::vector<double> log_omega, log_excess;
    for (std::size_t oi = 0; oi < n_omega; ++oi) {
      double total = 0.0;
      for (std::size_t rep = 0; rep < n_reps; ++rep)
        total += excess[(di * n_omega + oi) * n_reps + rep];
      const double mean = total / static_cast<double>(n_reps);
      row.cells.push_back({cfg.omega_grid[oi], mean});
      if (mean <= cfg.degenerate_tol) {
        defined = false;
        continue;
      }
      log_omega.push_back(std::log(static_cast<double>(cfg.omega_grid[oi])));
      log_excess.push_back(std::log(mean));
    }
    row.degenerate = !defined;
    if (defined) row.slope = ols_slope(log_omega, log_excess);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ttrec::theory
