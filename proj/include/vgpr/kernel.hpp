/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <span>
#include <vector>

#include "vgpr/data.hpp"
#include "vgpr/types.hpp"

namespace vgpr {

/// Relevance-scaled distance q with q^2 = sum_l sr[l] * (xi[l] - xj[l])^2.
/// Plain left-to-right accumulation: coordinates with sr[l] == 0 contribute
/// exactly nothing, so deselected covariates behave as deleted columns.
double scaled_distance(const Vector& xi, const Vector& xj, const Vector& sr);

/// Isotropic kernel value at scaled distance q. Matern with smoothness 2.5:
/// sigma2 * (1 + q + q^2/3) * exp(-q); squared exponential: sigma2 * exp(-q^2).
double kernel_eval(double q, double sigma2, KernelFamily family);

/// d kernel / d(q^2), finite at q = 0 for both families. For matern25 the
/// chain rule through u = q^2 gives -sigma2 * (1 + q) * exp(-q) / 6.
double kernel_eval_du(double q, double sigma2, KernelFamily family);

/// Covariance entries K(x_rows[a], x_cols[b]); tau2 is added where the row and
/// column refer to the same observation.
Matrix covariance_block(const Matrix& X, std::span<const int> rows, std::span<const int> cols,
                        const Hyperparameters& theta, bool add_noise);
Matrix covariance_block(const Dataset& ds, std::span<const int> rows, std::span<const int> cols,
                        const Hyperparameters& theta, bool add_noise);

/// Entrywise partial derivative of covariance_block with respect to one
/// parameter (noise excluded from the sigma2 derivative).
Matrix covariance_block_grad(const Matrix& X, std::span<const int> rows, std::span<const int> cols,
                             const Hyperparameters& theta, ParamRef wrt);
Matrix covariance_block_grad(const Dataset& ds, std::span<const int> rows, std::span<const int> cols,
                             const Hyperparameters& theta, ParamRef wrt);

/// Full noisy covariance matrix K + tau2 I over all rows of X.
Matrix dense_covariance(const Matrix& X, const Hyperparameters& theta);

/// Cholesky with the standard jitter policy: on failure add
/// 1e-10 * sigma2 to the diagonal and retry once, then throw
/// NotPositiveDefiniteError. Returns the lower factor.
Matrix cholesky_with_jitter(Matrix A, double sigma2, bool* jitter_used = nullptr);

}  // namespace vgpr
