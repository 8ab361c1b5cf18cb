/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace vgpr {

PenaltyState::PenaltyState(double lambda_in, double gamma_in, int kappa_in, int d_in)
    : lambda(lambda_in), gamma(gamma_in), kappa(kappa_in), d(d_in) {
  if (lambda < 0.0) throw std::invalid_argument("PenaltyState: lambda must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("PenaltyState: gamma must be in (0, 1]");
  if (kappa < 0) throw std::invalid_argument("PenaltyState: kappa must be >= 0");
}

Vector PenaltyState::adaptive_weights(const std::vector<int>& idx) const {
  Vector c = Vector::Zero(static_cast<Eigen::Index>(idx.size()));
  if (kappa == 0) return c;
  if (history.empty()) {
    c.setConstant(1e-8);
    return c;
  }
  for (const Vector& past : history)
    for (std::size_t j = 0; j < idx.size(); ++j) c[static_cast<Eigen::Index>(j)] += past[idx[j]];
  return c;
}

double penalty_value(const PenaltyState& state, const std::vector<int>& idx, const Vector& sr) {
  if (sr.size() != static_cast<Eigen::Index>(idx.size()))
    throw std::invalid_argument("penalty_value: idx/sr length mismatch");
  if (state.lambda == 0.0) return 0.0;
  const Vector c = state.adaptive_weights(idx);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < sr.size(); ++j) sum += std::pow(c[j] + sr[j], state.gamma);
  return state.lambda * sum;
}

Vector penalty_grad(const PenaltyState& state, const std::vector<int>& idx, const Vector& sr,
                    bool* capped) {
  if (sr.size() != static_cast<Eigen::Index>(idx.size()))
    throw std::invalid_argument("penalty_grad: idx/sr length mismatch");
  if (capped) *capped = false;
  Vector g = Vector::Zero(sr.size());
  if (state.lambda == 0.0) return g;
  const Vector c = state.adaptive_weights(idx);
  for (Eigen::Index j = 0; j < sr.size(); ++j) {
    const double base = c[j] + sr[j];
    if (base <= 0.0) {
      g[j] = kPenaltyGradCap;  // true derivative is +infinity
      if (capped) *capped = true;
    } else {
      g[j] = state.lambda * state.gamma * std::pow(base, state.gamma - 1.0);
    }
  }
  return g;
}

void update_history(PenaltyState& state, const Vector& sr_accepted) {
  for (Eigen::Index l = 0; l < sr_accepted.size(); ++l)
    if (sr_accepted[l] < 0.0) throw std::invalid_argument("update_history: negative squared relevance");
  if (state.kappa > 0) {
    state.history.push_back(sr_accepted);
    while (static_cast<int>(state.history.size()) > state.kappa) state.history.pop_front();
  }
  ++state.iter;
}

}  // namespace vgpr
