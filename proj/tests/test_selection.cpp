/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "vgpr/data.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/selection.hpp"

using namespace vgpr;

namespace {

SimulationSpec small_gp_spec(int n, int d, std::uint64_t seed, KernelFamily family,
                             int n_true = 3) {
  SimulationSpec spec;
  spec.n = n;
  spec.d = d;
  spec.theta_true.family = family;
  spec.theta_true.sigma2 = 1.0;
  spec.theta_true.tau2 = 0.05 * 0.05;
  spec.theta_true.sr = Vector::Zero(d);
  const double r[5] = {10.0, 5.0, 2.0, 1.0, 0.5};
  for (int l = 0; l < std::min(n_true, 5); ++l) spec.theta_true.sr[l] = r[l] * r[l];
  spec.seed = seed;
  return spec;
}

Hyperparameters floored_theta(int d, double sr_floor = 1e-8) {
  Hyperparameters theta;
  theta.sigma2 = 1.0;
  theta.tau2 = 0.05 * 0.05;
  theta.sr = Vector::Constant(d, sr_floor);
  return theta;
}

}  // namespace

TEST_CASE("screening with k = d - |zeta| returns every remaining index") {
  const Dataset ds = simulate(small_gp_spec(200, 6, 1, KernelFamily::matern25));
  const Hyperparameters theta = floored_theta(6);
  const VecchiaPlan plan = build_plan(ds, theta, 10, ConditioningStrategy::scaled_nn);
  const std::vector<int> zeta = {2};
  const auto picked = sr_gradient_screen(ds, plan, theta, zeta, 5);
  std::vector<int> sorted = picked;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 3, 4, 5});
  CHECK_THROWS_AS(sr_gradient_screen(ds, plan, theta, zeta, 6), std::invalid_argument);
}

TEST_CASE("duplicated columns tie and break to the lower index") {
  Dataset ds = simulate(small_gp_spec(150, 5, 2, KernelFamily::matern25));
  ds.X.col(4) = ds.X.col(3);
  const Hyperparameters theta = floored_theta(5);
  const VecchiaPlan plan = build_plan(ds, theta, 8, ConditioningStrategy::scaled_nn);

  std::vector<ParamRef> sr_params;
  for (int l = 0; l < 5; ++l) sr_params.push_back(ParamRef::Sr(l));
  const Vector grad = vecchia_grad(ds, plan, theta, sr_params);
  CHECK(grad[3] == grad[4]);

  const auto picked = sr_gradient_screen(ds, plan, theta, {}, 5);
  const auto pos3 = std::find(picked.begin(), picked.end(), 3);
  const auto pos4 = std::find(picked.begin(), picked.end(), 4);
  CHECK(pos3 < pos4);
}

TEST_CASE("screening ranks true covariates first on simulated data") {
  // d = 50 with 5 true covariates under the squared exponential kernel; the
  // top-5 screened indices should contain at least 4 of the truth in at
  // least 4 of 5 seeds.
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset ds = simulate(small_gp_spec(2000, 50, 100 + seed, KernelFamily::sqexp, 5));
    Hyperparameters theta = floored_theta(50);
    theta.family = KernelFamily::sqexp;
    const VecchiaPlan plan = build_plan(ds, theta, 20, ConditioningStrategy::scaled_nn);
    const auto picked = sr_gradient_screen(ds, plan, theta, {}, 5);
    int hits = 0;
    for (int l : picked)
      if (l < 5) ++hits;
    if (hits >= 4) ++pass;
  }
  CHECK(pass >= 4);
}

TEST_CASE("oos rmse: interpolation limit and prior-mean baseline") {
  SimulationSpec spec = small_gp_spec(300, 4, 7, KernelFamily::matern25);
  spec.theta_true.tau2 = 1e-8;
  const Dataset ds = simulate(spec);

  Dataset train = ds, oos = ds;
  train.X = ds.X.topRows(200);
  train.y = ds.y.head(200);
  oos.X = ds.X.topRows(50);  // duplicated training points
  oos.y = ds.y.head(50);
  Hyperparameters theta = spec.theta_true;
  CHECK(oos_rmse(train, theta, oos, 20) < 1e-3);

  // Empty model: predictions hover near the (standardized) zero mean.
  Dataset heldout = ds;
  heldout.X = ds.X.bottomRows(100);
  heldout.y = ds.y.tail(100);
  Hyperparameters empty = theta;
  empty.sr.setZero();
  const double sd = std::sqrt((heldout.y.array() - heldout.y.mean()).square().sum() / 99.0);
  const double base = oos_rmse(train, empty, heldout, 20);
  CHECK(std::abs(base - sd) / sd < 0.05);
  CHECK(oos_rmse(train, empty, heldout, 20) == base);  // deterministic
}

TEST_CASE("candidate set bookkeeping") {
  CandidateSet c;
  c.add(3);
  c.add(1);
  c.add(5);
  CHECK(c.zeta == std::vector<int>{1, 3, 5});
  CHECK(c.contains(3));
  c.remove(3);
  CHECK(!c.contains(3));
  CHECK(c.zeta == std::vector<int>{1, 5});
  CHECK_THROWS_AS(c.remove(2), std::logic_error);
  CHECK(c.events.size() == 4);
}

TEST_CASE("forward-backward saturates on an all-true design") {
  SimulationSpec spec = small_gp_spec(400, 3, 9, KernelFamily::matern25, 3);
  const Dataset raw = simulate(spec);
  const Dataset ds = standardize(raw);
  auto [train, oos] = train_oos_split(ds, 1);

  FitConfig cfg;
  cfg.m = 10;
  cfg.k = 2;
  cfg.seed = 5;
  cfg.opt.max_iter = 30;

  FitState st;
  st.theta = floored_theta(3);
  st.theta.sigma2 = cfg.sigma2_init;
  st.theta.tau2 = cfg.tau2_init;
  st.penalty = PenaltyState(0.5, cfg.gamma, 0, 3);  // generous penalty level
  st.plan = build_plan(train, st.theta, cfg.m, ConditioningStrategy::scaled_nn);

  forward_backward(train, oos, st, cfg);
  CHECK(st.cand.zeta == std::vector<int>{0, 1, 2});
  // Backward-step soundness: removals only ever happen at exactly zero, so
  // every removed index must have been re-added before appearing in zeta.
  for (const auto& [what, idx] : st.cand.events) CHECK((what == '+' || what == '-'));
}

TEST_CASE("vgpr path on a small instance") {
  SimulationSpec spec = small_gp_spec(800, 12, 21, KernelFamily::matern25, 3);
  const Dataset ds = standardize(simulate(spec));

  FitConfig cfg;
  cfg.m = 12;
  cfg.k = 2;
  cfg.seed = 3;
  cfg.opt.max_iter = 30;

  const auto records = vgpr_path(ds, cfg);
  REQUIRE(!records.empty());
  CHECK(records.front().zeta.empty());  // lambda0 = n implies the empty model

  int stops = 0;
  double best = records.front().oos_rmse;
  for (const auto& r : records) {
    if (r.is_stop) ++stops;
    best = std::min(best, r.oos_rmse);
    CHECK(static_cast<int>(r.zeta.size()) <= 9);  // O(d0) active set (3 * d0)
  }
  CHECK(stops == 1);

  const PathRecord* stop = nullptr;
  for (const auto& r : records)
    if (r.is_stop) stop = &r;
  CHECK(stop->oos_rmse == doctest::Approx(best));
  // The stopping model explains the data far better than the empty model.
  CHECK(stop->oos_rmse < 0.5 * records.front().oos_rmse);
  // Unselected relevances are reported as exact zeros.
  for (int l = 0; l < 12; ++l) {
    const bool in_zeta = std::find(stop->zeta.begin(), stop->zeta.end(), l) != stop->zeta.end();
    if (!in_zeta) CHECK(stop->theta.sr[l] == 0.0);
    else CHECK(stop->theta.sr[l] > 0.0);
  }
}

TEST_CASE("the path is reproducible under a fixed seed") {
  SimulationSpec spec = small_gp_spec(500, 8, 33, KernelFamily::matern25, 2);
  const Dataset ds = standardize(simulate(spec));

  FitConfig cfg;
  cfg.m = 10;
  cfg.k = 2;
  cfg.seed = 11;
  cfg.batch = 64;
  cfg.kappa = 2;
  cfg.opt.max_iter = 40;

  const auto a = vgpr_path(ds, cfg);
  const auto b = vgpr_path(ds, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lambda == b[i].lambda);
    CHECK(a[i].zeta == b[i].zeta);
    CHECK(a[i].theta.sr == b[i].theta.sr);
    CHECK(a[i].oos_rmse == b[i].oos_rmse);
  }
}
