/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vgpr {

void VecchiaPlan::validate() const {
  const int nn = n();
  std::vector<std::uint8_t> seen(nn, 0);
  for (int p : perm) {
    if (p < 0 || p >= nn || seen[p]) throw std::logic_error("VecchiaPlan: perm is not a permutation");
    seen[p] = 1;
  }
  if (static_cast<int>(cond.size()) != nn) throw std::logic_error("VecchiaPlan: cond size mismatch");
  for (int i = 0; i < nn; ++i) {
    if (static_cast<int>(cond[i].size()) != std::min(i, m))
      throw std::logic_error("VecchiaPlan: |cond[i]| != min(i, m)");
    for (int j : cond[i])
      if (j < 0 || j >= i) throw std::logic_error("VecchiaPlan: conditioning position out of range");
  }
}

namespace {

// Rows of X scaled by sqrt(sr), so squared scaled distances become plain
// squared Euclidean distances computable with matrix products.
Matrix scaled_coords(const Matrix& X, const Vector& sr) {
  Matrix S = X;
  for (Eigen::Index l = 0; l < sr.size(); ++l) S.col(l) *= std::sqrt(sr[l]);
  return S;
}

}  // namespace

std::vector<int> maxmin_order(const Dataset& ds, const Vector& sr) {
  const int n = ds.n();
  if (sr.size() != ds.d()) throw std::invalid_argument("maxmin_order: sr length mismatch");
  const Matrix S = scaled_coords(ds.X, sr);
  const Vector sqnorm = S.rowwise().squaredNorm();

  std::vector<int> order;
  order.reserve(n);
  std::vector<std::uint8_t> placed(n, 0);

  // Anchor: nearest point to the scaled centroid, ties to the lowest index.
  const Vector centroid = S.colwise().mean().transpose();
  int first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double dist = (S.row(i).transpose() - centroid).squaredNorm();
    if (dist < best) {
      best = dist;
      first = i;
    }
  }
  order.push_back(first);
  placed[first] = 1;

  // mindist2[p]: squared scaled distance from p to the closest ordered point.
  Vector mindist2 = (sqnorm.array() + sqnorm[first] - 2.0 * (S * S.row(first).transpose()).array()).max(0.0);

  for (int step = 1; step < n; ++step) {
    int next = -1;
    double far = -1.0;
    for (int p = 0; p < n; ++p) {
      if (placed[p]) continue;
      if (mindist2[p] > far) {
        far = mindist2[p];
        next = p;
      }
    }
    order.push_back(next);
    placed[next] = 1;
    const Vector dist_new = (sqnorm.array() + sqnorm[next] - 2.0 * (S * S.row(next).transpose()).array()).max(0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int p = 0; p < n; ++p)
      if (dist_new[p] < mindist2[p]) mindist2[p] = dist_new[p];
  }
  return order;
}

std::vector<std::vector<int>> nn_conditioning(const Dataset& ds, const std::vector<int>& perm,
                                              const Vector& sr, int m) {
  if (m < 1) throw std::invalid_argument("nn_conditioning: m must be >= 1");
  const int n = static_cast<int>(perm.size());
  const Matrix S = scaled_coords(ds.X, sr);
  // Coordinates in ordered positions.
  Matrix P(n, S.cols());
  for (int i = 0; i < n; ++i) P.row(i) = S.row(perm[i]);
  const Vector sqnorm = P.rowwise().squaredNorm();

  std::vector<std::vector<int>> cond(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (int i = 1; i < n; ++i) {
    const int k = std::min(i, m);
    const Vector d2 = (sqnorm.head(i).array() + sqnorm[i] - 2.0 * (P.topRows(i) * P.row(i).transpose()).array()).max(0.0);
    std::vector<int> idx(i);
    std::iota(idx.begin(), idx.end(), 0);
    const auto closer = [&d2](int a, int b) { return d2[a] < d2[b] || (d2[a] == d2[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), closer);
    cond[i].assign(idx.begin(), idx.begin() + k);
    std::sort(cond[i].begin(), cond[i].end());
  }
  return cond;
}

std::vector<std::vector<int>> fic_conditioning(int n, int m) {
  if (m < 1) throw std::invalid_argument("fic_conditioning: m must be >= 1");
  std::vector<std::vector<int>> cond(n);
  for (int i = 1; i < n; ++i) {
    const int k = std::min(i, m);
    cond[i].resize(k);
    std::iota(cond[i].begin(), cond[i].end(), 0);
  }
  return cond;
}

VecchiaPlan build_plan(const Dataset& ds, const Hyperparameters& theta, int m,
                       ConditioningStrategy strategy) {
  if (theta.sr.size() != ds.d()) throw std::invalid_argument("build_plan: sr length mismatch");
  VecchiaPlan plan;
  plan.m = m;
  plan.sr_used = strategy == ConditioningStrategy::scaled_nn ? theta.sr : Vector::Ones(ds.d());
  plan.perm = maxmin_order(ds, plan.sr_used);
  plan.cond = strategy == ConditioningStrategy::fic
                  ? fic_conditioning(ds.n(), m)
                  : nn_conditioning(ds, plan.perm, plan.sr_used, m);
  return plan;
}

}  // namespace vgpr
