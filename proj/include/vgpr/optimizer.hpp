/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "vgpr/types.hpp"

namespace vgpr {

struct OptimizerConfig {
  int max_iter = 100;              // 200 is the mini-batch default
  double armijo_c = 1e-4;
  double beta_min = 0x1.0p-20;     // line-search floor
  double tol_rel_obj = 1e-6;       // full-batch stop, over a 3-iteration window
  int obj_window = 3;
  int tempering_window = 10;
  double alpha_floor = 0x1.0p-10;  // mini-batch stop
  int batch_size = 0;              // 0 = full batch
  double fim_ridge = 1e-8;
  double ccd_tol = 1e-10;
  int ccd_max_sweeps = 500;
};

/// Objective to be minimized. value/gradient/FIM must refer to the same
/// mini-batch within an iteration; next_batch (optional) advances it.
struct Objective {
  std::function<double(const Vector&)> value;
  /// Fills the gradient of the minimized objective and the positive
  /// semidefinite curvature surrogate (likelihood FIM; penalty curvature
  /// excluded).
  std::function<void(const Vector&, Vector&, Matrix&)> grad_and_curvature;
  std::function<void()> next_batch;               // optional
  std::function<void(const Vector&)> on_accept;   // optional; penalty history hook
};

/// Bound-constrained minimizer of the local quadratic model
/// g^T (x - theta) + 1/2 (x - theta)^T H (x - theta) over x >= b, by cyclic
/// coordinate sweeps with analytic univariate minima. H must have a strictly
/// positive diagonal.
Vector ccd(const Vector& theta, const Vector& g, const Matrix& H, const Vector& b,
           double tol = 1e-10, int max_sweeps = 500);

/// Running-inner-product stationarity detector for mini-batch runs: the
/// learning rate alpha halves whenever the windowed sum of successive
/// gradient inner products turns negative.
struct StationarityState {
  Vector grad_prev;
  double dot_sum = 0.0;
  int calls = 0;
  double alpha = 1.0;
  int window = 10;
};

void stationarity_update(StationarityState& state, const Vector& g_new);

struct QccdIterTrace {
  int iter = 0;
  double obj_before = 0.0;
  double obj_after = 0.0;
  double alpha = 1.0;
  double beta = 0.0;  // 0 on line-search failure
  int at_bound = 0;
  Vector theta_after;
};

struct QccdResult {
  Vector theta;
  int iterations = 0;
  bool converged = false;
  std::vector<QccdIterTrace> trace;
};

/// Quadratic constrained coordinate descent: per iteration a CCD step on the
/// alpha-scaled quadratic model followed by backtracking under the Armijo
/// sufficient-decrease test h(theta + beta*step) <= h(theta) +
/// c*beta*g^T step. Full-batch runs stop on a relative-objective window;
/// mini-batch runs stop on max_iter or the alpha floor.
QccdResult qccd(const Objective& objective, const Vector& theta0, const Vector& lower_bounds,
                const OptimizerConfig& config);

}  // namespace vgpr
