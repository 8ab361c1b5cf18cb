/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "vgpr/data.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/types.hpp"
#include "vgpr/vecchia.hpp"

namespace vgpr {

inline constexpr int kDenseGuard = 8192;

/// Exact zero-mean multivariate normal log-density via dense Cholesky.
double dense_loglik(const Dataset& ds, const Hyperparameters& theta);

/// Dense log-likelihood with exact gradient and FIM over the active
/// parameters; the reference the Vecchia path is tested against.
LikelihoodReport dense_evaluate(const Dataset& ds, const Hyperparameters& theta,
                                const std::vector<ParamRef>& active, bool want_grad, bool want_fim);

/// Sparse upper-triangular factor U (in permuted order) of the precision
/// implied by the plan: Sigma_hat^{-1} = U U^T, with column i supported on
/// {i} union cond[i]. U(i,i) = v_i^{-1/2} and U(cond[i], i) = -b_i v_i^{-1/2},
/// where b_i are the conditional-mean coefficients and v_i the conditional
/// variance of term i.
Eigen::SparseMatrix<double> vecchia_implied_precision_factor(const VecchiaPlan& plan,
                                                             const Dataset& ds,
                                                             const Hyperparameters& theta);

/// KL(N(0, sigma0) || N(0, sigma1)) for dense covariances.
double gaussian_kl(const Matrix& sigma0, const Matrix& sigma1);

/// Same divergence with Sigma1 given through its implied precision factor;
/// sigma0_permuted must already be in the factor's permuted order.
double gaussian_kl(const Matrix& sigma0_permuted, const Eigen::SparseMatrix<double>& U);

struct KlBenchmarkRow {
  std::string strategy;
  int m = 0;
  int replicate = 0;
  double kl = 0.0;
};

/// KL of the implied joint against the exact GP density at the true
/// parameters, per conditioning-set size and strategy, replicated over fresh
/// covariate draws.
std::vector<KlBenchmarkRow> benchmark_kl(const SimulationSpec& spec, const std::vector<int>& m_list,
                                         const std::vector<ConditioningStrategy>& strategies,
                                         int replicates, std::uint64_t seed);

std::string strategy_name(ConditioningStrategy s);

void write_kl_csv(const std::vector<KlBenchmarkRow>& rows, const std::string& path);

}  // namespace vgpr
