/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/oracle.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "vgpr/csv.hpp"
#include "vgpr/kernel.hpp"
#include "vgpr/rng.hpp"

namespace vgpr {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

double dense_loglik(const Dataset& ds, const Hyperparameters& theta) {
  const int n = ds.n();
  if (n > kDenseGuard) throw std::invalid_argument("dense_loglik: n exceeds the dense guard");
  const Matrix L = cholesky_with_jitter(dense_covariance(ds.X, theta), theta.sigma2);
  const Vector u = L.triangularView<Eigen::Lower>().solve(ds.y);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(L(i, i));
  return -0.5 * n * kLogTwoPi - logdet - 0.5 * u.squaredNorm();
}

LikelihoodReport dense_evaluate(const Dataset& ds, const Hyperparameters& theta,
                                const std::vector<ParamRef>& active, bool want_grad, bool want_fim) {
  const int n = ds.n();
  if (n > kDenseGuard) throw std::invalid_argument("dense_evaluate: n exceeds the dense guard");
  const int np = static_cast<int>(active.size());

  const Matrix sigma = dense_covariance(ds.X, theta);
  const Matrix L = cholesky_with_jitter(sigma, theta.sigma2);
  const Vector u = L.triangularView<Eigen::Lower>().solve(ds.y);

  LikelihoodReport rep;
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(L(i, i));
  rep.loglik = -0.5 * n * kLogTwoPi - logdet - 0.5 * u.squaredNorm();
  if (!want_grad && !want_fim) return rep;

  Matrix sigma_inv = Matrix::Identity(n, n);
  L.triangularView<Eigen::Lower>().solveInPlace(sigma_inv);
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(sigma_inv);
  const Vector z = sigma_inv * ds.y;

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::vector<Matrix> blocks(np);
  for (int p = 0; p < np; ++p) blocks[p] = covariance_block_grad(ds.X, all, all, theta, active[p]);

  if (want_grad) {
    rep.grad.resize(np);
    for (int p = 0; p < np; ++p)
      rep.grad[p] = 0.5 * z.dot(blocks[p] * z) - 0.5 * sigma_inv.cwiseProduct(blocks[p]).sum();
  }
  if (want_fim) {
    rep.fim.resize(np, np);
    std::vector<Matrix> weighted(np);
    for (int p = 0; p < np; ++p) weighted[p] = sigma_inv * blocks[p] * sigma_inv;
    for (int p = 0; p < np; ++p)
      for (int q = p; q < np; ++q) {
        const double f = 0.5 * weighted[p].cwiseProduct(blocks[q]).sum();
        rep.fim(p, q) = f;
        rep.fim(q, p) = f;
      }
  }
  return rep;
}

Eigen::SparseMatrix<double> vecchia_implied_precision_factor(const VecchiaPlan& plan,
                                                             const Dataset& ds,
                                                             const Hyperparameters& theta) {
  const int n = plan.n();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (plan.m + 1));
  std::vector<int> rows;
  for (int i = 0; i < n; ++i) {
    const std::vector<int>& c = plan.cond[i];
    const int s = static_cast<int>(c.size());
    rows.resize(s + 1);
    for (int j = 0; j < s; ++j) rows[j] = plan.perm[c[j]];
    rows[s] = plan.perm[i];
    const Matrix J = covariance_block(ds.X, rows, rows, theta, true);
    const Matrix L = cholesky_with_jitter(J, theta.sigma2);
    // v_i = L(s,s)^2; b = J_cc^{-1} k from the leading-block factor.
    const double sqrt_v = L(s, s);
    trips.emplace_back(i, i, 1.0 / sqrt_v);
    if (s > 0) {
      const Vector k = J.col(s).head(s);
      Vector b = L.topLeftCorner(s, s).triangularView<Eigen::Lower>().solve(k);
      L.topLeftCorner(s, s).transpose().triangularView<Eigen::Upper>().solveInPlace(b);
      for (int j = 0; j < s; ++j) trips.emplace_back(c[j], i, -b[j] / sqrt_v);
    }
  }
  Eigen::SparseMatrix<double> U(n, n);
  U.setFromTriplets(trips.begin(), trips.end());
  return U;
}

double gaussian_kl(const Matrix& sigma0, const Matrix& sigma1) {
  const int n = static_cast<int>(sigma0.rows());
  if (sigma0.rows() != sigma0.cols() || sigma1.rows() != sigma1.cols() || sigma1.rows() != n)
    throw std::invalid_argument("gaussian_kl: dimension mismatch");
  Eigen::LLT<Matrix> llt0(sigma0);
  Eigen::LLT<Matrix> llt1(sigma1);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success)
    throw NotPositiveDefiniteError("gaussian_kl: covariance not positive definite");
  const Matrix L0 = llt0.matrixL();
  const Matrix L1 = llt1.matrixL();
  // tr(Sigma1^{-1} Sigma0) = ||L1^{-1} L0||_F^2.
  const Matrix A = L1.triangularView<Eigen::Lower>().solve(L0);
  double logdet0 = 0.0, logdet1 = 0.0;
  for (int i = 0; i < n; ++i) {
    logdet0 += std::log(L0(i, i));
    logdet1 += std::log(L1(i, i));
  }
  return 0.5 * (A.squaredNorm() - n) + logdet1 - logdet0;
}

double gaussian_kl(const Matrix& sigma0_permuted, const Eigen::SparseMatrix<double>& U) {
  const int n = static_cast<int>(sigma0_permuted.rows());
  if (U.rows() != n || U.cols() != n) throw std::invalid_argument("gaussian_kl: dimension mismatch");
  Eigen::LLT<Matrix> llt0(sigma0_permuted);
  if (llt0.info() != Eigen::Success)
    throw NotPositiveDefiniteError("gaussian_kl: exact covariance not positive definite");
  const Matrix L0 = llt0.matrixL();
  double logdet0 = 0.0;
  for (int i = 0; i < n; ++i) logdet0 += std::log(L0(i, i));

  // tr(U U^T Sigma0) = sum_i u_i^T Sigma0 u_i over the sparse columns, and
  // logdet Sigma1 = -2 * sum_i log U(i,i).
  double trace = 0.0;
  double logdet1 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(U, i); it; ++it) {
      if (it.row() == i) logdet1 -= 2.0 * std::log(it.value());
      for (Eigen::SparseMatrix<double>::InnerIterator jt(U, i); jt; ++jt)
        trace += it.value() * jt.value() * sigma0_permuted(it.row(), jt.row());
    }
  }
  return 0.5 * (trace - n + logdet1) - logdet0;
}

std::string strategy_name(ConditioningStrategy s) {
  switch (s) {
    case ConditioningStrategy::scaled_nn: return "scaled-nn";
    case ConditioningStrategy::unscaled_nn: return "unscaled-nn";
    case ConditioningStrategy::fic: return "fic";
  }
  throw std::logic_error("unknown strategy");
}

std::vector<KlBenchmarkRow> benchmark_kl(const SimulationSpec& spec, const std::vector<int>& m_list,
                                         const std::vector<ConditioningStrategy>& strategies,
                                         int replicates, std::uint64_t seed) {
  spec.validate();
  if (spec.n > kDenseGuard) throw std::invalid_argument("benchmark_kl: n exceeds the dense guard");

  std::vector<KlBenchmarkRow> rows;
  for (int rep = 0; rep < replicates; ++rep) {
    Dataset ds;
    ds.X = simulate_covariates(spec, rng::derive(seed, "kl_replicate", static_cast<std::uint64_t>(rep)));
    ds.y = Vector::Zero(spec.n);
    const Matrix sigma0 = dense_covariance(ds.X, spec.theta_true);
    for (ConditioningStrategy strat : strategies) {
      for (int m : m_list) {
        const int m_eff = std::min(m, spec.n - 1);
        const VecchiaPlan plan = build_plan(ds, spec.theta_true, m_eff, strat);
        const Eigen::SparseMatrix<double> U = vecchia_implied_precision_factor(plan, ds, spec.theta_true);
        Matrix sigma0_perm(spec.n, spec.n);
        for (int a = 0; a < spec.n; ++a)
          for (int b = 0; b < spec.n; ++b) sigma0_perm(a, b) = sigma0(plan.perm[a], plan.perm[b]);
        rows.push_back({strategy_name(strat), m_eff, rep, gaussian_kl(sigma0_perm, U)});
      }
    }
  }
  return rows;
}

void write_kl_csv(const std::vector<KlBenchmarkRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "strategy,m,replicate,kl\n";
  for (const auto& r : rows)
    out << r.strategy << ',' << r.m << ',' << r.replicate << ',' << csv::format_double(r.kl) << '\n';
}

}  // namespace vgpr
