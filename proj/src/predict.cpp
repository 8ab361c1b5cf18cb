/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vgpr/kernel.hpp"

namespace vgpr {

namespace {

// Per-point kriging given the neighbor set, O(m^3).
void predict_one(const Dataset& train, const Hyperparameters& theta, const Vector& sr_scaling,
                 const Vector& x, int m, bool want_variance, bool latent_scale, double& mean_out,
                 double& var_out) {
  const int n = train.n();

  // m nearest training rows under the scaled distance, ties to lower index.
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int l = 0; l < train.d(); ++l) {
      const double diff = x[l] - train.X(i, l);
      acc += sr_scaling[l] * diff * diff;
    }
    d2[i] = acc;
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const auto closer = [&d2](int a, int b) { return d2[a] < d2[b] || (d2[a] == d2[b] && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + m, idx.end(), closer);
  std::vector<int> nbrs(idx.begin(), idx.begin() + m);
  std::sort(nbrs.begin(), nbrs.end());

  const Matrix Kc = covariance_block(train.X, nbrs, nbrs, theta, true);
  Vector kstar(m);
  Vector yc(m);
  for (int j = 0; j < m; ++j) {
    const double q = scaled_distance(x, train.X.row(nbrs[j]).transpose(), theta.sr);
    kstar[j] = kernel_eval(q, theta.sigma2, theta.family);
    yc[j] = train.y[nbrs[j]];
  }

  const Matrix L = cholesky_with_jitter(Kc, theta.sigma2);
  const Vector a = L.triangularView<Eigen::Lower>().solve(kstar);
  const Vector u = L.triangularView<Eigen::Lower>().solve(yc);
  mean_out = a.dot(u);
  if (want_variance) {
    double v = theta.sigma2 + theta.tau2 - a.squaredNorm();
    if (latent_scale) v -= theta.tau2;
    var_out = v;
  }
}

}  // namespace

Prediction predict(const Dataset& train, const Hyperparameters& theta, const Vector& sr_scaling,
                   const Matrix& X_test, int m, bool want_variance, bool latent_scale,
                   ExecPolicy policy) {
  if (m < 1 || m > train.n()) throw std::invalid_argument("predict: need 1 <= m <= n");
  if (X_test.cols() != train.d()) throw std::invalid_argument("predict: test covariate count mismatch");
  if (sr_scaling.size() != train.d()) throw std::invalid_argument("predict: sr_scaling length mismatch");

  const int nt = static_cast<int>(X_test.rows());
  Prediction out;
  out.mean.resize(nt);
  if (want_variance) out.variance.resize(nt);

  bool failed = false;
  std::string error_msg;
  const auto run = [&](int t) {
    double v = 0.0;
    predict_one(train, theta, sr_scaling, X_test.row(t).transpose(), m, want_variance, latent_scale,
                out.mean[t], v);
    if (want_variance) out.variance[t] = v;
  };

  if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
    for (int t = 0; t < nt; ++t) {
      if (failed) continue;
      try {
        run(t);
      } catch (const std::exception& e) {
#pragma omp critical
        {
          failed = true;
          error_msg = e.what();
        }
      }
    }
#else
    policy = ExecPolicy::serial;
#endif
  }
  if (policy == ExecPolicy::serial)
    for (int t = 0; t < nt; ++t) run(t);
  if (failed) throw NotPositiveDefiniteError(error_msg);
  return out;
}

}  // namespace vgpr
