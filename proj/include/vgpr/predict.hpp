/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include "vgpr/data.hpp"
#include "vgpr/types.hpp"

namespace vgpr {

struct Prediction {
  Vector mean;
  Vector variance;
};

/// Posterior predictive mean and variance per test row, conditioning on the m
/// nearest training points under the scaled distance q^{sr_scaling}
/// (tie-break to the lower training index). Variance is on the response scale
/// (noise included) unless latent_scale is set. Test points are independent
/// and processed in parallel.
Prediction predict(const Dataset& train, const Hyperparameters& theta, const Vector& sr_scaling,
                   const Matrix& X_test, int m, bool want_variance,
                   bool latent_scale = false, ExecPolicy policy = ExecPolicy::parallel);

}  // namespace vgpr
