/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace vgpr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelFamily { matern25, sqexp };

enum class ExecPolicy { serial, parallel };

/// Covariance hyperparameters: signal variance, squared relevances (one per
/// covariate), and noise variance. Squared relevances are the optimization
/// variables; relevances r_l = sqrt(sr[l]) are always derived on the fly.
struct Hyperparameters {
  double sigma2 = 1.0;
  Vector sr;  // length d, entries >= 0
  double tau2 = 0.0;
  KernelFamily family = KernelFamily::matern25;

  int dim() const { return static_cast<int>(sr.size()); }
  void validate() const;
};

/// Identifies one scalar covariance parameter.
struct ParamRef {
  enum class Kind { sigma2, sr, tau2 };
  Kind kind = Kind::sigma2;
  int index = -1;  // covariate index when kind == sr

  static ParamRef Sigma2() { return {Kind::sigma2, -1}; }
  static ParamRef Sr(int l) { return {Kind::sr, l}; }
  static ParamRef Tau2() { return {Kind::tau2, -1}; }

  bool operator==(const ParamRef&) const = default;
};

/// Parameter layout used by gradient/FIM consumers: sigma2 first, the squared
/// relevances of `zeta` in ascending covariate order, tau2 last.
std::vector<ParamRef> active_parameters(const std::vector<int>& zeta);

/// Thrown when a covariance block is not positive definite even after the
/// jitter retry.
struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vgpr
