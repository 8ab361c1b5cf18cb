/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace vgpr {

Vector ccd(const Vector& theta, const Vector& g, const Matrix& H, const Vector& b, double tol,
           int max_sweeps) {
  const Eigen::Index n = theta.size();
  if (g.size() != n || b.size() != n || H.rows() != n || H.cols() != n)
    throw std::invalid_argument("ccd: dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(H(i, i) > 0.0)) throw std::invalid_argument("ccd: nonpositive curvature diagonal");

  // d = g - H*theta0, so the model gradient at x is d + H*x.
  const Vector d = g - H * theta;
  Vector x = theta.cwiseMax(b);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double off = H.row(i).dot(x) - H(i, i) * x[i];
      const double xi = std::max((-d[i] - off) / H(i, i), b[i]);
      max_change = std::max(max_change, std::abs(xi - x[i]));
      x[i] = xi;
    }
    if (max_change < tol) break;
  }
  return x;
}

void stationarity_update(StationarityState& state, const Vector& g_new) {
  ++state.calls;
  if (state.calls > 1) state.dot_sum += g_new.dot(state.grad_prev);
  state.grad_prev = g_new;
  if (state.calls % state.window == 0) {
    if (state.dot_sum < 0.0) state.alpha *= 0.5;
    state.dot_sum = 0.0;
  }
}

QccdResult qccd(const Objective& objective, const Vector& theta0, const Vector& lower_bounds,
                const OptimizerConfig& config) {
  const Eigen::Index n = theta0.size();
  if (lower_bounds.size() != n) throw std::invalid_argument("qccd: bounds dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (theta0[i] < lower_bounds[i]) throw std::invalid_argument("qccd: theta0 violates lower bounds");

  const bool minibatch = config.batch_size > 0;
  QccdResult res;
  res.theta = theta0;
  StationarityState stationarity;
  stationarity.window = config.tempering_window;

  Vector g(n);
  Matrix H(n, n);
  std::vector<double> accepted_obj;

  for (int iter = 0; iter < config.max_iter; ++iter) {
    if (minibatch && objective.next_batch) objective.next_batch();
    objective.grad_and_curvature(res.theta, g, H);
    H.diagonal().array() += config.fim_ridge * (1.0 + H.diagonal().maxCoeff());

    const Vector theta_ccd =
        ccd(res.theta, stationarity.alpha * g, H, lower_bounds, config.ccd_tol, config.ccd_max_sweeps);
    const Vector step = theta_ccd - res.theta;
    const double slope = g.dot(step);
    const double h0 = objective.value(res.theta);

    double beta = 1.0;
    bool accepted = false;
    double h_new = h0;
    if (step.lpNorm<Eigen::Infinity>() > 0.0) {
      while (beta >= config.beta_min) {
        const Vector trial = beta == 1.0 ? theta_ccd : (res.theta + beta * step).cwiseMax(lower_bounds);
        const double h_trial = objective.value(trial);
        if (h_trial <= h0 + config.armijo_c * beta * slope) {
          res.theta = trial;
          h_new = h_trial;
          accepted = true;
          break;
        }
        beta *= 0.5;
      }
    }

    if (minibatch) stationarity_update(stationarity, g);
    if (objective.on_accept) objective.on_accept(res.theta);

    int at_bound = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (res.theta[i] == lower_bounds[i]) ++at_bound;
    res.trace.push_back({iter, h0, h_new, stationarity.alpha, accepted ? beta : 0.0, at_bound, res.theta});
    accepted_obj.push_back(h_new);
    ++res.iterations;

    if (minibatch) {
      if (stationarity.alpha < config.alpha_floor) {
        res.converged = true;
        break;
      }
    } else {
      const int w = config.obj_window;
      if (static_cast<int>(accepted_obj.size()) > w) {
        const double prev = accepted_obj[accepted_obj.size() - 1 - w];
        const double cur = accepted_obj.back();
        if (std::abs(prev - cur) <= config.tol_rel_obj * std::max(1.0, std::abs(cur))) {
          res.converged = true;
          break;
        }
      }
    }
  }
  return res;
}

}  // namespace vgpr
