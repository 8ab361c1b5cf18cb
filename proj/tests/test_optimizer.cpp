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

#include <cmath>
#include <limits>

#include "test_support.hpp"
#include "vgpr/data.hpp"
#include "vgpr/optimizer.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/penalty.hpp"
#include "vgpr/rng.hpp"
#include "vgpr/vecchia.hpp"

using namespace vgpr;

namespace {

// Exhaustive active-set solution of min g^T(x-t0) + 1/2 (x-t0)^T H (x-t0)
// s.t. x >= b, for dimensions small enough to enumerate.
Vector kkt_enumerate(const Vector& t0, const Vector& g, const Matrix& H, const Vector& b) {
  const int n = static_cast<int>(t0.size());
  const Vector d = g - H * t0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> fixed, free;
    for (int i = 0; i < n; ++i) (mask >> i & 1) ? fixed.push_back(i) : free.push_back(i);
    Vector x(n);
    for (int i : fixed) x[i] = b[i];
    if (!free.empty()) {
      Matrix Hff(free.size(), free.size());
      Vector rhs(free.size());
      for (std::size_t a = 0; a < free.size(); ++a) {
        rhs[a] = -d[free[a]];
        for (int i : fixed) rhs[a] -= H(free[a], i) * b[i];
        for (std::size_t c = 0; c < free.size(); ++c) Hff(a, c) = H(free[a], free[c]);
      }
      const Vector xf = Hff.ldlt().solve(rhs);
      for (std::size_t a = 0; a < free.size(); ++a) x[free[a]] = xf[a];
    }
    // Feasibility and nonnegative multipliers.
    bool ok = true;
    const Vector grad = d + H * x;
    for (int i : free)
      if (x[i] < b[i] - 1e-12 || std::abs(grad[i]) > 1e-8) ok = false;
    for (int i : fixed)
      if (grad[i] < -1e-8) ok = false;
    if (ok) return x;
  }
  throw std::logic_error("no KKT point found");
}

}  // namespace

TEST_CASE("ccd solves simple quadratics") {
  Vector t0(1), g(1), b(1);
  Matrix H(1, 1);
  H << 2.0;
  t0 << 0.0;
  g << -4.0;  // unconstrained minimum at 2
  b << 0.0;
  CHECK(ccd(t0, g, H, b)[0] == doctest::Approx(2.0));
  // Same quadratic (unconstrained minimum at 2) expanded at t0 = 3, bound 3.
  b << 3.0;
  t0 << 3.0;
  g << 2.0;  // H * (t0 - 2)
  CHECK(ccd(t0, g, H, b)[0] == doctest::Approx(3.0));
}

TEST_CASE("ccd: both bounds active in the 2-d example") {
  Matrix H(2, 2);
  H << 2.0, 1.0, 1.0, 2.0;
  Vector t0 = Vector::Zero(2);
  const Vector target = Vector::Constant(2, -1.0);
  const Vector g = H * (t0 - target);  // gradient of the quadratic at t0
  const Vector b = Vector::Zero(2);
  const Vector x = ccd(t0, g, H, b);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
  CHECK(x.isApprox(kkt_enumerate(t0, g, H, b), 1e-10));
}

TEST_CASE("ccd agrees with exhaustive active-set enumeration on random quadratics") {
  rng::Rng gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + gen.uniform_int(3);
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gen.normal();
    const Matrix H = A.transpose() * A + 0.1 * Matrix::Identity(n, n);
    Vector t0(n), g(n), b(n);
    for (int i = 0; i < n; ++i) {
      b[i] = gen.normal();
      t0[i] = b[i] + std::abs(gen.normal());
      g[i] = 3.0 * gen.normal();
    }
    const Vector got = ccd(t0, g, H, b, 1e-12, 2000);
    const Vector want = kkt_enumerate(t0, g, H, b);
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-8);
    for (int i = 0; i < n; ++i) CHECK(got[i] >= b[i]);
  }
}

TEST_CASE("ccd rejects nonpositive curvature") {
  Matrix H(1, 1);
  H << 0.0;
  Vector v = Vector::Zero(1);
  CHECK_THROWS_AS(ccd(v, v, H, v), std::invalid_argument);
}

TEST_CASE("qccd minimizes an exact quadratic in one iteration") {
  Matrix H(3, 3);
  H << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  Vector target(3);
  target << 1.0, -2.0, 0.5;

  Objective obj;
  obj.value = [&](const Vector& x) { return 0.5 * (x - target).dot(H * (x - target)); };
  obj.grad_and_curvature = [&](const Vector& x, Vector& g, Matrix& Hout) {
    g = H * (x - target);
    Hout = H;
  };
  OptimizerConfig cfg;
  const Vector lo = Vector::Constant(3, -1e30);
  const QccdResult res = qccd(obj, Vector::Zero(3), lo, cfg);
  CHECK((res.theta - target).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK(res.trace[0].beta == 1.0);
  CHECK(res.converged);
}

TEST_CASE("stationarity detector") {
  StationarityState st;
  st.window = 4;
  Vector g(2);
  g << 1.0, 2.0;
  for (int i = 0; i < 8; ++i) stationarity_update(st, g);
  CHECK(st.alpha == 1.0);  // aligned gradients: no tempering

  StationarityState osc;
  osc.window = 4;
  for (int i = 0; i < 8; ++i) {
    Vector gi = (i % 2 == 0) ? g : Vector(-g);
    stationarity_update(osc, gi);
  }
  CHECK(osc.alpha == doctest::Approx(0.25));  // halved at both window ends

  StationarityState k;
  k.window = 1;
  Vector gneg = -g;
  stationarity_update(k, g);
  for (int i = 0; i < 5; ++i) stationarity_update(k, i % 2 == 0 ? gneg : g);
  CHECK(k.alpha == doctest::Approx(std::pow(2.0, -5)));
}

namespace {

struct SmallGp {
  Dataset ds;
  VecchiaPlan plan;
  std::vector<int> zeta;
  std::vector<ParamRef> active;

  explicit SmallGp(std::uint64_t seed, int n = 300, int d = 3) {
    SimulationSpec spec;
    spec.n = n;
    spec.d = d;
    spec.theta_true.sigma2 = 1.0;
    spec.theta_true.tau2 = 0.05 * 0.05;
    spec.theta_true.sr = Vector::Zero(d);
    spec.theta_true.sr[0] = 4.0;
    spec.theta_true.sr[1] = 1.0;
    if (d > 2) spec.theta_true.sr[2] = 0.25;
    spec.seed = seed;
    ds = simulate(spec);
    plan = build_plan(ds, spec.theta_true, 10, ConditioningStrategy::scaled_nn);
    for (int l = 0; l < d; ++l) zeta.push_back(l);
    active = active_parameters(zeta);
  }

  Hyperparameters unpack(const Vector& a) const {
    Hyperparameters th;
    th.family = KernelFamily::matern25;
    th.sigma2 = a[0];
    th.sr.resize(zeta.size());
    for (std::size_t j = 0; j < zeta.size(); ++j) th.sr[j] = a[1 + j];
    th.tau2 = a[a.size() - 1];
    return th;
  }

  Objective unpenalized() {
    Objective obj;
    obj.value = [this](const Vector& a) { return -vecchia_loglik(ds, plan, unpack(a)); };
    obj.grad_and_curvature = [this](const Vector& a, Vector& g, Matrix& H) {
      const auto rep = vecchia_evaluate(ds, plan, unpack(a), active, true, true);
      g = -rep.grad;
      H = rep.fim;
    };
    return obj;
  }

  Vector start() const {
    Vector a(zeta.size() + 2);
    a[0] = 0.25;
    for (std::size_t j = 0; j < zeta.size(); ++j) a[1 + j] = 0.5;
    a[a.size() - 1] = 1e-4;
    return a;
  }

  Vector bounds() const {
    Vector b = Vector::Zero(zeta.size() + 2);
    b[0] = 1e-8;
    b[b.size() - 1] = 1e-8;
    return b;
  }
};

// Fisher-scoring ascent with step halving to stay in the interior; the
// reference iteration QCCD is compared against.
double fisher_scoring_objective(SmallGp& gp, int iters) {
  Vector a = gp.start();
  double ll = vecchia_loglik(gp.ds, gp.plan, gp.unpack(a));
  for (int it = 0; it < iters; ++it) {
    const auto rep = vecchia_evaluate(gp.ds, gp.plan, gp.unpack(a), gp.active, true, true);
    Matrix H = rep.fim;
    H.diagonal().array() += 1e-8 * (1.0 + H.diagonal().maxCoeff());
    const Vector step = H.ldlt().solve(rep.grad);
    double scale = 1.0;
    for (int half = 0; half < 30; ++half) {
      const Vector trial = a + scale * step;
      if ((trial.array() > 0.0).all()) {
        const double ll_trial = vecchia_loglik(gp.ds, gp.plan, gp.unpack(trial));
        if (ll_trial >= ll) {
          a = trial;
          ll = ll_trial;
          break;
        }
      }
      scale *= 0.5;
    }
  }
  return -ll;
}

}  // namespace

TEST_CASE("qccd tracks the Fisher-scoring reference on an unpenalized objective") {
  SmallGp gp(17);
  OptimizerConfig cfg;
  cfg.max_iter = 60;
  const QccdResult res = qccd(gp.unpenalized(), gp.start(), gp.bounds(), cfg);
  const double obj_qccd = res.trace.back().obj_after;
  const double obj_fisher = fisher_scoring_objective(gp, 60);
  CHECK(vgpr::test::rel_err(obj_qccd, obj_fisher) < 1e-4);
}

TEST_CASE("full-batch qccd: accepted objective nonincreasing, bounds exact") {
  SmallGp gp(23);
  PenaltyState penalty(8.0, 0.25, 0, 3);
  Objective obj = gp.unpenalized();
  const std::vector<int> idx = {0, 1, 2};
  auto base_value = obj.value;
  auto base_grad = obj.grad_and_curvature;
  obj.value = [&, base_value](const Vector& a) {
    return base_value(a) + penalty_value(penalty, idx, a.segment(1, 3));
  };
  obj.grad_and_curvature = [&, base_grad](const Vector& a, Vector& g, Matrix& H) {
    base_grad(a, g, H);
    g.segment(1, 3) += penalty_grad(penalty, idx, a.segment(1, 3));
  };

  OptimizerConfig cfg;
  cfg.max_iter = 40;
  const QccdResult res = qccd(obj, gp.start(), gp.bounds(), cfg);
  const Vector b = gp.bounds();
  for (std::size_t t = 0; t < res.trace.size(); ++t) {
    CHECK(res.trace[t].obj_after <= res.trace[t].obj_before + 1e-10);
    if (t > 0) CHECK(res.trace[t].obj_before == doctest::Approx(res.trace[t - 1].obj_after));
    for (Eigen::Index i = 0; i < b.size(); ++i) CHECK(res.trace[t].theta_after[i] >= b[i]);
  }
}

TEST_CASE("qccd rejects infeasible starts") {
  Objective obj;
  obj.value = [](const Vector& x) { return x.squaredNorm(); };
  obj.grad_and_curvature = [](const Vector& x, Vector& g, Matrix& H) {
    g = 2.0 * x;
    H = 2.0 * Matrix::Identity(x.size(), x.size());
  };
  OptimizerConfig cfg;
  Vector t0 = Vector::Constant(2, -1.0);
  Vector b = Vector::Zero(2);
  CHECK_THROWS_AS(qccd(obj, t0, b, cfg), std::invalid_argument);
}
