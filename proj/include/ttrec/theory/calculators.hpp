// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form bound calculators for the two-tower function class: the
// parameter-Lipschitz constant C(W,L,B), the bracketing-entropy bound, the
// approximation-error bound 3pM*eps, the convergence-rate report, and the
// width/depth orders the rate prescribes. All natural logarithms.

#pragma once

#include <cstdint>
#include <optional>

namespace ttrec::theory {

// C(W,L,B) = (WB)^L (L/B + L/(WB-1)) - ((WB)^L - 1)/(WB-1)^2.
// Rejects WB == 1 (singular denominator) and non-positive W, L, B.
double lipschitz_constant(int width, int depth, double weight_bound);

struct BoundInputs {
  int W = 0;           // user-tower width
  int L = 0;           // user-tower depth
  double B = 0.0;      // user-tower weight magnitude cap
  int W_tilde = 0;     // item-tower analogues
  int L_tilde = 0;
  double B_tilde = 0.0;
  int p = 0;           // embedding dimension
  double M = 0.0;      // Holder-ball radius / output cap
  double beta = 0.0;   // smoothness
  int d_u = 0;         // intrinsic dimensions
  int d_i = 0;
  std::int64_t omega_size = 0;  // |Omega|
  double sigma2 = 0.0;          // noise variance
  double B_e = 0.0;             // noise bound
  double lambda_omega = 0.0;    // penalty weight at this |Omega|
  double J_R0 = 0.0;            // penalty value of the reference model
};

void validate(const BoundInputs& in);

// C2 (W ln W + W~ ln W~) ln(C3 (C + C~) / eps) with C2 = 28 max{L, L~} and
// C3 = 2 p^{3/2} M max{B, B~}. Rejects a log argument <= 1 (eps too large for
// these constants: the bound would be non-positive).
double entropy_bound(const BoundInputs& in, double eps);

// 3 p M eps.
double approx_bound(int p, double M, double eps);

struct WidthSchedule {
  double W_order = 0.0;        // eps^{-d_u / beta}
  double W_tilde_order = 0.0;  // eps^{-d_i / beta}
  // eps^{-s} when the magnitude exponent s is supplied; the theory leaves s
  // unspecified, so there is no default.
  std::optional<double> B_order;
};

WidthSchedule width_schedule(double eps, double beta, int d_u, int d_i,
                             std::optional<double> s = std::nullopt);

struct BoundReport {
  double lipschitz_C = 0.0;
  double lipschitz_C_tilde = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double rate_exponent = 0.0;  // 2 beta / (2 beta + d_ui), in (0, 1)
  int L_ui = 0;                // max{L, L~}
  int d_ui = 0;                // max{d_u, d_i}
  bool lambda_condition_holds = false;
  double width_order = 0.0;        // |Omega|^{d_ui/(2 beta + d_ui)} ln|Omega|
  double depth_order_user = 0.0;   // beta log2(beta) / d_u
  double depth_order_item = 0.0;

  // L_ui |Omega|^{-rate_exponent} (ln |Omega|)^2.
  double rate_value(std::int64_t omega) const;
};

// Assembles every constant of the convergence statement:
//   C1 = 6 max{50 p^2 M^4 + 4 sigma^2, 1} (25 p^2 M^4 + B_e^2) / 13,
//   lambda condition: 4 lambda J(R0) <= L_ui |Omega|^{-exp} ln|Omega|.
BoundReport rate_report(const BoundInputs& in);

}  // namespace ttrec::theory
