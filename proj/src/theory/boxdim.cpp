// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/theory/boxdim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <unordered_set>

#include "ttrec/error.hpp"
#include "ttrec/parallel.hpp"

namespace ttrec::theory {

std::int64_t count_occupied_boxes(const Eigen::MatrixXd& points, double eps) {
  require(eps > 0.0, Errc::invalid_argument, "box side must be positive");
  const auto n = points.rows();
  const auto dim = points.cols();
  // Keys are the exact integer box coordinates, stored as raw bytes; equality
  // is the full key, so counts carry no hash-collision risk.
  std::unordered_set<std::string> boxes;
  boxes.reserve(static_cast<std::size_t>(n));
  std::string key(static_cast<std::size_t>(dim) * sizeof(std::int64_t), '\0');
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto cell = static_cast<std::int64_t>(std::floor(points(r, c) / eps));
      std::memcpy(key.data() + static_cast<std::size_t>(c) * sizeof(std::int64_t), &cell,
                  sizeof(std::int64_t));
    }
    boxes.insert(key);
  }
  return static_cast<std::int64_t>(boxes.size());
}

BoxCountReport minkowski_dimension(const Eigen::MatrixXd& points,
                                   const std::vector<double>& scales, bool serial) {
  require(points.rows() >= 100, Errc::invalid_argument,
          "box-counting needs at least 100 points, got " + std::to_string(points.rows()));
  require(scales.size() >= 3, Errc::invalid_argument,
          "box-counting needs at least 3 scales, got " + std::to_string(scales.size()));
  double lo = scales[0], hi = scales[0];
  for (const double s : scales) {
    require(s > 0.0, Errc::invalid_argument, "box-counting scales must be positive");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          Errc::invalid_argument, "box-counting scales must be pairwise distinct");
  require(hi / lo >= 4.0 * (1.0 - 1e-12), Errc::invalid_argument,
          "box-counting scales must span at least two octaves (max/min >= 4)");

  BoxCountReport report;
  report.scales = scales;
  report.counts.assign(scales.size(), 0);
  if (serial) {
    for (std::size_t k = 0; k < scales.size(); ++k)
      report.counts[k] = count_occupied_boxes(points, scales[k]);
  } else {
    parallel_for(static_cast<std::int64_t>(scales.size()), [&](std::int64_t k) {
      report.counts[static_cast<std::size_t>(k)] =
          count_occupied_boxes(points, scales[static_cast<std::size_t>(k)]);
    });
  }

  // OLS slope of log N against log(1/eps).
  const auto m = static_cast<double>(scales.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    mean_x += std::log(1.0 / scales[k]);
    mean_y += std::log(static_cast<double>(report.counts[k]));
  }
  mean_x /= m;
  mean_y /= m;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double dx = std::log(1.0 / scales[k]) - mean_x;
    const double dy = std::log(static_cast<double>(report.counts[k])) - mean_y;
    num += dx * dy;
    den += dx * dx;
  }
  report.dimension = num / den;  // den > 0: scales are distinct
  return report;
}

const std::vector<double>& default_scales() {
  static const std::vector<double> scales{0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  return scales;
}

}  // namespace ttrec::theory
