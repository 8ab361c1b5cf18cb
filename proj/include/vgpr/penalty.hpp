/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <deque>
#include <vector>

#include "vgpr/types.hpp"

namespace vgpr {

/// Iterative adaptive bridge penalty on squared relevances,
/// lambda * sum_l (c_l + sr_l)^gamma, where c_l sums each covariate's sr over
/// the last kappa accepted iterates. kappa = 0 is the classic bridge penalty.
struct PenaltyState {
  double lambda = 0.0;
  double gamma = 0.25;  // in (0, 1]
  int kappa = 0;
  int d = 0;
  std::deque<Vector> history;  // most recent last, length <= kappa
  long iter = 0;

  PenaltyState() = default;
  PenaltyState(double lambda_in, double gamma_in, int kappa_in, int d_in);

  /// Adaptive weights c_l for the covariates in `idx`. With kappa > 0 and an
  /// empty history the weights fall back to 1e-8 so the gradient stays finite.
  Vector adaptive_weights(const std::vector<int>& idx) const;
};

/// Gradient cap standing in for the infinite bridge derivative at zero.
inline constexpr double kPenaltyGradCap = 1e12;

/// Penalty over the covariates `idx` with squared relevances `sr` (aligned
/// with idx).
double penalty_value(const PenaltyState& state, const std::vector<int>& idx, const Vector& sr);

/// Component l: lambda * gamma * (c_l + sr_l)^(gamma-1); capped at
/// kPenaltyGradCap when c_l + sr_l == 0 (sets *capped if given).
Vector penalty_grad(const PenaltyState& state, const std::vector<int>& idx, const Vector& sr,
                    bool* capped = nullptr);

/// Pushes an accepted full-d squared-relevance vector, evicts beyond kappa,
/// increments the iteration counter.
void update_history(PenaltyState& state, const Vector& sr_accepted);

}  // namespace vgpr
