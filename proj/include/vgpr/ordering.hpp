/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <vector>

#include "vgpr/data.hpp"
#include "vgpr/types.hpp"

namespace vgpr {

/// Ordering plus truncated conditioning sets. perm maps ordered position to
/// original row; cond[i] holds predecessor positions (< i), |cond[i]| =
/// min(i, m). sr_used records the squared relevances the plan was built with.
struct VecchiaPlan {
  std::vector<int> perm;
  std::vector<std::vector<int>> cond;
  int m = 0;
  Vector sr_used;

  int n() const { return static_cast<int>(perm.size()); }
  void validate() const;
};

/// Exact greedy maximin ordering under the scaled distance q^sr. The first
/// point is the one nearest the centroid of the scaled coordinates; each
/// subsequent point maximizes the minimum scaled distance to the points
/// already ordered. All ties break to the lowest original index. O(n^2 d).
std::vector<int> maxmin_order(const Dataset& ds, const Vector& sr);

/// cond[i] = positions of the min(i, m) nearest predecessors under q^sr,
/// ties to the lower position. Brute force, O(n^2 d).
std::vector<std::vector<int>> nn_conditioning(const Dataset& ds, const std::vector<int>& perm,
                                              const Vector& sr, int m);

/// Conditioning on the first min(i, m) ordered points only (FIC as a Vecchia
/// special case).
std::vector<std::vector<int>> fic_conditioning(int n, int m);

enum class ConditioningStrategy { scaled_nn, unscaled_nn, fic };

/// Maximin ordering composed with the chosen conditioning rule. scaled_nn
/// uses theta.sr; unscaled_nn and fic use all-ones relevances.
VecchiaPlan build_plan(const Dataset& ds, const Hyperparameters& theta, int m,
                       ConditioningStrategy strategy);

}  // namespace vgpr
