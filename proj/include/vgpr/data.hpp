/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vgpr/types.hpp"

namespace vgpr {

/// Covariate matrix plus response vector, with standardization metadata so
/// predictions can be mapped back to the original scale.
struct Dataset {
  Matrix X;  // n x d
  Vector y;  // n
  std::vector<std::string> col_names;  // d covariate names (x1..xd when generated)
  std::string response_name = "y";

  bool standardized = false;
  Vector col_means, col_sds;
  double y_mean = 0.0, y_sd = 1.0;
  std::vector<std::uint8_t> constant_cols;  // flagged columns left unscaled

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }

  /// Checks shape agreement and that all entries are finite.
  void validate() const;
};

Dataset make_dataset(Matrix X, Vector y);

enum class CovariateMode { independent_latin_hypercube, correlated_normal };

struct SimulationSpec {
  int n = 0;
  int d = 0;
  Hyperparameters theta_true;
  CovariateMode covariate_mode = CovariateMode::independent_latin_hypercube;
  double rho = 0.9;  // for correlated_normal, in [0,1)
  std::uint64_t seed = 1;

  void validate() const;
};

/// Reads a CSV with a header row; `response_column` becomes y and the
/// remaining columns become X in header order.
Dataset load_csv(const std::string& path, const std::string& response_column);

/// Writes the dataset with the response first, round-trip exact.
void save_csv(const Dataset& ds, const std::string& path);

/// Centers and scales every covariate column and the response (sample sd,
/// divisor n-1). Constant columns are flagged and left unscaled. Errors if
/// `ds` is already standardized.
Dataset standardize(const Dataset& ds);

/// Inverse transform of a standardized response value.
double destandardize_y(const Dataset& ds, double y_std);

/// Maps raw covariate rows onto the standardized scale of `ref`.
Matrix apply_standardization(const Dataset& ref, const Matrix& X_raw);

/// Seeded uniform split; the out-of-sample part has min(floor(n/4), 5000)
/// rows unless `oos_size_override` > 0.
std::pair<Dataset, Dataset> train_oos_split(const Dataset& ds, std::uint64_t seed,
                                            int oos_size_override = -1);

/// Draws covariates per the spec'd mode and a response from N(0, K + tau2 I).
/// Dense Cholesky sampling for n <= 8192; the sparse Vecchia factor with
/// m=100 (approximate) above that.
Dataset simulate(const SimulationSpec& spec);

/// Covariate generation alone (no response), used by the KL benchmark.
Matrix simulate_covariates(const SimulationSpec& spec, std::uint64_t seed);

/// One response draw for fixed covariates; dense path, n <= 8192.
Vector simulate_responses_dense(const Matrix& X, const Hyperparameters& theta, std::uint64_t seed);

}  // namespace vgpr
