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
#include <optional>
#include <vector>

#include "vgpr/data.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/types.hpp"

namespace vgpr {

/// Subset of permuted positions whose likelihood summands are evaluated.
struct MiniBatch {
  std::vector<int> indices;  // distinct, ascending
  int size() const { return static_cast<int>(indices.size()); }
};

/// Uniform subset of {0..n-1} without replacement, seeded.
MiniBatch sample_minibatch(int n, int take, std::uint64_t seed);

struct LikelihoodReport {
  double loglik = 0.0;
  Vector grad;  // over active parameters
  Matrix fim;   // over active parameters, symmetric PSD
};

/// The scaled-Vecchia log-likelihood and its derivatives: a sum of n (or |S|)
/// independent conditional-Gaussian terms, each costing one Cholesky of the
/// (|cond|+1)-sized joint block. Per-term results are stored in buffers and
/// reduced in ascending index order, so serial and parallel execution agree
/// bitwise. Batch sums are raw (not rescaled by n/|S|).
LikelihoodReport vecchia_evaluate(const Dataset& ds, const VecchiaPlan& plan,
                                  const Hyperparameters& theta, const std::vector<ParamRef>& active,
                                  bool want_grad, bool want_fim, const MiniBatch* batch = nullptr,
                                  ExecPolicy policy = ExecPolicy::parallel);

double vecchia_loglik(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                      const MiniBatch* batch = nullptr, ExecPolicy policy = ExecPolicy::parallel);

Vector vecchia_grad(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                    const std::vector<ParamRef>& active, const MiniBatch* batch = nullptr,
                    ExecPolicy policy = ExecPolicy::parallel);

Matrix vecchia_fim(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                   const std::vector<ParamRef>& active, const MiniBatch* batch = nullptr,
                   ExecPolicy policy = ExecPolicy::parallel);

/// Per-term conditional log-densities in ascending position order; exposed for
/// tests and diagnostics.
Vector vecchia_term_loglik(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                           const MiniBatch* batch = nullptr,
                           ExecPolicy policy = ExecPolicy::parallel);

}  // namespace vgpr
