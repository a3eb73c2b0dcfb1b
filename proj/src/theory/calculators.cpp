// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/theory/calculators.hpp"

#include <cmath>

#include "ttrec/error.hpp"

namespace ttrec::theory {

double lipschitz_constant(int width, int depth, double weight_bound) {
  require(width >= 1, Errc::invalid_argument, "Lipschitz constant needs width >= 1");
  require(depth >= 1, Errc::invalid_argument, "Lipschitz constant needs depth >= 1");
  require(weight_bound > 0.0, Errc::invalid_argument, "Lipschitz constant needs B > 0");
  const double wb = static_cast<double>(width) * weight_bound;
  require(wb != 1.0, Errc::singular, "Lipschitz constant undefined at W*B = 1");
  const double L = static_cast<double>(depth);
  const double pw = std::pow(wb, L);
  return pw * (L / weight_bound + L / (wb - 1.0)) - (pw - 1.0) / ((wb - 1.0) * (wb - 1.0));
}

void validate(const BoundInputs& in) {
  require(in.W >= 1 && in.L >= 1 && in.B > 0.0, Errc::config_invalid,
          "user-tower bound inputs must be positive");
  require(in.W_tilde >= 1 && in.L_tilde >= 1 && in.B_tilde > 0.0, Errc::config_invalid,
          "item-tower bound inputs must be positive");
  require(in.p >= 1, Errc::config_invalid, "embedding dimension must be >= 1");
  require(in.M > 0.0, Errc::config_invalid, "output cap M must be positive");
  require(in.beta > 0.0, Errc::config_invalid, "smoothness beta must be positive");
  require(in.d_u >= 1 && in.d_i >= 1, Errc::config_invalid,
          "intrinsic dimensions must be >= 1");
  require(in.omega_size >= 2, Errc::config_invalid, "|Omega| must be >= 2");
  require(in.sigma2 >= 0.0 && in.B_e >= 0.0, Errc::config_invalid,
          "noise parameters must be non-negative");
  require(in.lambda_omega >= 0.0 && in.J_R0 >= 0.0, Errc::config_invalid,
          "penalty parameters must be non-negative");
}

double entropy_bound(const BoundInputs& in, double eps) {
  validate(in);
  require(eps > 0.0, Errc::invalid_argument, "entropy bound needs eps > 0");
  const double c = lipschitz_constant(in.W, in.L, in.B);
  const double c_tilde = lipschitz_constant(in.W_tilde, in.L_tilde, in.B_tilde);
  const double c2 = 28.0 * static_cast<double>(std::max(in.L, in.L_tilde));
  const double c3 = 2.0 * std::pow(static_cast<double>(in.p), 1.5) * in.M *
                    std::max(in.B, in.B_tilde);
  const double log_arg = c3 * (c + c_tilde) / eps;
  require(log_arg > 1.0, Errc::invalid_argument,
          "entropy bound degenerates: eps too large for these constants");
  const double w = static_cast<double>(in.W), wt = static_cast<double>(in.W_tilde);
  return c2 * (w * std::log(w) + wt * std::log(wt)) * std::log(log_arg);
}

double approx_bound(int p, double M, double eps) {
  require(p >= 1 && M > 0.0 && eps > 0.0, Errc::invalid_argument,
          "approximation bound needs positive p, M, eps");
  return 3.0 * static_cast<double>(p) * M * eps;
}

WidthSchedule width_schedule(double eps, double beta, int d_u, int d_i,
                             std::optional<double> s) {
  require(eps > 0.0 && beta > 0.0, Errc::invalid_argument,
          "width schedule needs eps > 0 and beta > 0");
  require(d_u >= 1 && d_i >= 1, Errc::invalid_argument,
          "width schedule needs intrinsic dimensions >= 1");
  WidthSchedule sched;
  sched.W_order = std::pow(eps, -static_cast<double>(d_u) / beta);
  sched.W_tilde_order = std::pow(eps, -static_cast<double>(d_i) / beta);
  if (s.has_value()) sched.B_order = std::pow(eps, -*s);
  return sched;
}

double BoundReport::rate_value(std::int64_t omega) const {
  const double n = static_cast<double>(omega);
  const double lg = std::log(n);
  return static_cast<double>(L_ui) * std::pow(n, -rate_exponent) * lg * lg;
}

BoundReport rate_report(const BoundInputs& in) {
  validate(in);
  BoundReport rep;
  rep.lipschitz_C = lipschitz_constant(in.W, in.L, in.B);
  rep.lipschitz_C_tilde = lipschitz_constant(in.W_tilde, in.L_tilde, in.B_tilde);
  rep.C2 = 28.0 * static_cast<double>(std::max(in.L, in.L_tilde));
  rep.C3 = 2.0 * std::pow(static_cast<double>(in.p), 1.5) * in.M * std::max(in.B, in.B_tilde);
  const double pm4 = static_cast<double>(in.p) * static_cast<double>(in.p) *
                     std::pow(in.M, 4.0);
  rep.C1 = 6.0 * std::max(50.0 * pm4 + 4.0 * in.sigma2, 1.0) * (25.0 * pm4 + in.B_e * in.B_e) /
           13.0;
  rep.d_ui = std::max(in.d_u, in.d_i);
  rep.L_ui = std::max(in.L, in.L_tilde);
  rep.rate_exponent = 2.0 * in.beta / (2.0 * in.beta + static_cast<double>(rep.d_ui));

  const double n = static_cast<double>(in.omega_size);
  const double lg = std::log(n);
  rep.lambda_condition_holds =
      4.0 * in.lambda_omega * in.J_R0 <=
      static_cast<double>(rep.L_ui) * std::pow(n, -rep.rate_exponent) * lg;
  rep.width_order =
      std::pow(n, static_cast<double>(rep.d_ui) / (2.0 * in.beta + rep.d_ui)) * lg;
  rep.depth_order_user = in.beta * std::log2(in.beta) / static_cast<double>(in.d_u);
  rep.depth_order_item = in.beta * std::log2(in.beta) / static_cast<double>(in.d_i);
  return rep;
}

}  // namespace ttrec::theory
