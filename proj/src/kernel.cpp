/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vgpr {

void Hyperparameters::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be finite and >= 0");
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw std::invalid_argument("tau2 must be finite and >= 0");
  for (Eigen::Index l = 0; l < sr.size(); ++l)
    if (!(sr[l] >= 0.0) || !std::isfinite(sr[l]))
      throw std::invalid_argument("sr[" + std::to_string(l) + "] must be finite and >= 0");
}

std::vector<ParamRef> active_parameters(const std::vector<int>& zeta) {
  std::vector<ParamRef> params;
  params.reserve(zeta.size() + 2);
  params.push_back(ParamRef::Sigma2());
  std::vector<int> sorted = zeta;
  std::sort(sorted.begin(), sorted.end());
  for (int l : sorted) params.push_back(ParamRef::Sr(l));
  params.push_back(ParamRef::Tau2());
  return params;
}

double scaled_distance(const Vector& xi, const Vector& xj, const Vector& sr) {
  if (xi.size() != xj.size() || xi.size() != sr.size())
    throw std::invalid_argument("scaled_distance: length mismatch");
  double q2 = 0.0;
  for (Eigen::Index l = 0; l < sr.size(); ++l) {
    const double diff = xi[l] - xj[l];
    q2 += sr[l] * diff * diff;
  }
  return std::sqrt(q2);
}

double kernel_eval(double q, double sigma2, KernelFamily family) {
  if (q < 0.0) throw std::invalid_argument("kernel_eval: q must be >= 0");
  switch (family) {
    case KernelFamily::matern25:
      return sigma2 * (1.0 + q + q * q / 3.0) * std::exp(-q);
    case KernelFamily::sqexp:
      return sigma2 * std::exp(-q * q);
  }
  throw std::logic_error("unknown kernel family");
}

double kernel_eval_du(double q, double sigma2, KernelFamily family) {
  switch (family) {
    case KernelFamily::matern25:
      return -sigma2 * (1.0 + q) * std::exp(-q) / 6.0;
    case KernelFamily::sqexp:
      return -sigma2 * std::exp(-q * q);
  }
  throw std::logic_error("unknown kernel family");
}

namespace {

void check_indices(const Matrix& X, std::span<const int> idx) {
  for (int i : idx)
    if (i < 0 || i >= X.rows()) throw std::out_of_range("covariance_block: index out of range");
}

}  // namespace

Matrix covariance_block(const Matrix& X, std::span<const int> rows, std::span<const int> cols,
                        const Hyperparameters& theta, bool add_noise) {
  check_indices(X, rows);
  check_indices(X, cols);
  Matrix out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const Vector xa = X.row(rows[a]).transpose();
    for (std::size_t b = 0; b < cols.size(); ++b) {
      const double q = scaled_distance(xa, X.row(cols[b]).transpose(), theta.sr);
      double v = kernel_eval(q, theta.sigma2, theta.family);
      if (add_noise && rows[a] == cols[b]) v += theta.tau2;
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
    }
  }
  return out;
}

Matrix covariance_block(const Dataset& ds, std::span<const int> rows, std::span<const int> cols,
                        const Hyperparameters& theta, bool add_noise) {
  return covariance_block(ds.X, rows, cols, theta, add_noise);
}

Matrix covariance_block_grad(const Matrix& X, std::span<const int> rows, std::span<const int> cols,
                             const Hyperparameters& theta, ParamRef wrt) {
  check_indices(X, rows);
  check_indices(X, cols);
  if (wrt.kind == ParamRef::Kind::sr && (wrt.index < 0 || wrt.index >= X.cols()))
    throw std::invalid_argument("covariance_block_grad: invalid sr index");

  Matrix out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const Vector xa = X.row(rows[a]).transpose();
    for (std::size_t b = 0; b < cols.size(); ++b) {
      const Eigen::Index bi = static_cast<Eigen::Index>(b);
      const Eigen::Index ai = static_cast<Eigen::Index>(a);
      switch (wrt.kind) {
        case ParamRef::Kind::sigma2: {
          // K is linear in sigma2, so the derivative is the unit-variance kernel.
          const double q = scaled_distance(xa, X.row(cols[b]).transpose(), theta.sr);
          out(ai, bi) = kernel_eval(q, 1.0, theta.family);
          break;
        }
        case ParamRef::Kind::tau2:
          out(ai, bi) = (rows[a] == cols[b]) ? 1.0 : 0.0;
          break;
        case ParamRef::Kind::sr: {
          const double q = scaled_distance(xa, X.row(cols[b]).transpose(), theta.sr);
          const double diff = X(rows[a], wrt.index) - X(cols[b], wrt.index);
          out(ai, bi) = kernel_eval_du(q, theta.sigma2, theta.family) * diff * diff;
          break;
        }
      }
    }
  }
  return out;
}

Matrix covariance_block_grad(const Dataset& ds, std::span<const int> rows, std::span<const int> cols,
                             const Hyperparameters& theta, ParamRef wrt) {
  return covariance_block_grad(ds.X, rows, cols, theta, wrt);
}

Matrix dense_covariance(const Matrix& X, const Hyperparameters& theta) {
  const int n = static_cast<int>(X.rows());
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    const Vector xi = X.row(i).transpose();
    out(i, i) = theta.sigma2 + theta.tau2;
    for (int j = 0; j < i; ++j) {
      const double q = scaled_distance(xi, X.row(j).transpose(), theta.sr);
      const double v = kernel_eval(q, theta.sigma2, theta.family);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix cholesky_with_jitter(Matrix A, double sigma2, bool* jitter_used) {
  if (jitter_used) *jitter_used = false;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  A.diagonal().array() += 1e-10 * sigma2;
  llt.compute(A);
  if (llt.info() == Eigen::Success) {
    if (jitter_used) *jitter_used = true;
    return llt.matrixL();
  }
  throw NotPositiveDefiniteError("covariance block not positive definite after jitter retry");
}

}  // namespace vgpr
