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
#include <numbers>

#include "test_support.hpp"
#include "vgpr/kernel.hpp"
#include "vgpr/oracle.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/rng.hpp"
#include "vgpr/vecchia.hpp"

using namespace vgpr;
using vgpr::test::random_dataset;
using vgpr::test::random_theta;
using vgpr::test::rel_err;

TEST_CASE("single-term likelihood is the marginal normal density") {
  Matrix X(1, 2);
  X << 0.3, 0.7;
  Vector y(1);
  y << 1.3;
  const Dataset ds = make_dataset(X, y);
  Hyperparameters theta = random_theta(2, 1);
  const VecchiaPlan plan = build_plan(ds, theta, 1, ConditioningStrategy::scaled_nn);
  const double v = theta.sigma2 + theta.tau2;
  const double want = -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * y[0] * y[0] / v;
  CHECK(vecchia_loglik(ds, plan, theta) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("full conditioning reproduces the dense log-likelihood, gradient, and FIM") {
  const Dataset ds = random_dataset(50, 3, 60);
  const Hyperparameters theta = random_theta(3, 61);
  const VecchiaPlan plan = build_plan(ds, theta, ds.n() - 1, ConditioningStrategy::scaled_nn);
  const auto active = active_parameters({0, 1, 2});

  const auto vec = vecchia_evaluate(ds, plan, theta, active, true, true);
  const auto dense = dense_evaluate(ds, theta, active, true, true);

  CHECK(rel_err(vec.loglik, dense.loglik) < 1e-8);
  CHECK((vec.grad - dense.grad).lpNorm<Eigen::Infinity>() <
        1e-6 * std::max(1.0, dense.grad.lpNorm<Eigen::Infinity>()));
  CHECK((vec.fim - dense.fim).lpNorm<Eigen::Infinity>() <
        1e-6 * std::max(1.0, dense.fim.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("batch over every index equals the full evaluation bitwise") {
  const Dataset ds = random_dataset(40, 2, 70);
  const Hyperparameters theta = random_theta(2, 71);
  const VecchiaPlan plan = build_plan(ds, theta, 6, ConditioningStrategy::scaled_nn);
  const auto active = active_parameters({0, 1});
  MiniBatch all;
  for (int i = 0; i < ds.n(); ++i) all.indices.push_back(i);

  CHECK(vecchia_loglik(ds, plan, theta, &all) == vecchia_loglik(ds, plan, theta));
  const Vector ga = vecchia_grad(ds, plan, theta, active, &all);
  const Vector gf = vecchia_grad(ds, plan, theta, active);
  CHECK(ga == gf);
}

TEST_CASE("serial and parallel execution agree bitwise") {
  const Dataset ds = random_dataset(120, 3, 80);
  const Hyperparameters theta = random_theta(3, 81);
  const VecchiaPlan plan = build_plan(ds, theta, 8, ConditioningStrategy::scaled_nn);
  const auto active = active_parameters({0, 2});

  const auto a = vecchia_evaluate(ds, plan, theta, active, true, true, nullptr, ExecPolicy::serial);
  const auto b = vecchia_evaluate(ds, plan, theta, active, true, true, nullptr, ExecPolicy::parallel);
  CHECK(a.loglik == b.loglik);
  CHECK(a.grad == b.grad);
  CHECK(a.fim == b.fim);
}

TEST_CASE("gradient matches central finite differences of the log-likelihood") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Dataset ds = random_dataset(300, 5, 500 + seed);
    const Hyperparameters theta = random_theta(5, 600 + seed);
    const VecchiaPlan plan = build_plan(ds, theta, 10, ConditioningStrategy::scaled_nn);
    const auto active = active_parameters({0, 1, 2, 3, 4});
    const Vector grad = vecchia_grad(ds, plan, theta, active, nullptr);

    for (std::size_t p = 0; p < active.size(); ++p) {
      const auto eval_at = [&](double v) {
        Hyperparameters th = theta;
        if (active[p].kind == ParamRef::Kind::sigma2) th.sigma2 = v;
        else if (active[p].kind == ParamRef::Kind::tau2) th.tau2 = v;
        else th.sr[active[p].index] = v;
        return vecchia_loglik(ds, plan, th);
      };
      const double x0 = active[p].kind == ParamRef::Kind::sigma2 ? theta.sigma2
                        : active[p].kind == ParamRef::Kind::tau2 ? theta.tau2
                                                                 : theta.sr[active[p].index];
      const double h = 1e-5 * std::max(1.0, std::abs(x0));
      const double fd = (eval_at(x0 + h) - eval_at(x0 - h)) / (2.0 * h);
      CHECK(std::abs(grad[p] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("gradient for a constant covariate is exactly zero") {
  Dataset ds = random_dataset(25, 3, 90);
  ds.X.col(1).setConstant(0.42);
  const Hyperparameters theta = random_theta(3, 91);
  const VecchiaPlan plan = build_plan(ds, theta, 5, ConditioningStrategy::scaled_nn);
  const Vector grad = vecchia_grad(ds, plan, theta, {ParamRef::Sr(1)});
  CHECK(grad[0] == 0.0);
}

TEST_CASE("FIM: scalar case, symmetry, and positive semidefiniteness") {
  Matrix X(1, 1);
  X << 0.5;
  Vector y(1);
  y << -0.7;
  const Dataset one = make_dataset(X, y);
  Hyperparameters th1 = random_theta(1, 95);
  const VecchiaPlan p1 = build_plan(one, th1, 1, ConditioningStrategy::scaled_nn);
  const Matrix f1 = vecchia_fim(one, p1, th1, {ParamRef::Sigma2()});
  const double v = th1.sigma2 + th1.tau2;
  CHECK(f1(0, 0) == doctest::Approx(1.0 / (2.0 * v * v)).epsilon(1e-10));

  const Dataset ds = random_dataset(60, 3, 96);
  const Hyperparameters theta = random_theta(3, 97);
  const VecchiaPlan plan = build_plan(ds, theta, 7, ConditioningStrategy::scaled_nn);
  const Matrix fim = vecchia_fim(ds, plan, theta, active_parameters({0, 1, 2}));
  CHECK((fim - fim.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(fim);
  CHECK(eig.eigenvalues().minCoeff() > -1e-8 * std::max(1.0, eig.eigenvalues().maxCoeff()));
}

TEST_CASE("FIM matches the Monte-Carlo covariance of scores") {
  const int n = 30, sims = 5000;
  const Dataset base = random_dataset(n, 2, 123);
  Hyperparameters theta;
  theta.sigma2 = 1.0;
  theta.tau2 = 0.09;
  theta.sr = Vector::Constant(2, 1.5);
  const VecchiaPlan plan = build_plan(base, theta, n - 1, ConditioningStrategy::scaled_nn);
  const auto active = active_parameters({0, 1});
  const Matrix fim = vecchia_fim(base, plan, theta, active);

  const int np = static_cast<int>(active.size());
  Matrix acc = Matrix::Zero(np, np);
  Dataset sim = base;
  for (int s = 0; s < sims; ++s) {
    sim.y = simulate_responses_dense(base.X, theta, 40000 + s);
    const Vector score = vecchia_grad(sim, plan, theta, active);
    acc += score * score.transpose();
  }
  acc /= sims;
  CHECK((acc - fim).norm() / fim.norm() < 0.05);
}

TEST_CASE("reordering the summands only reassociates floating point") {
  const Dataset ds = random_dataset(200, 3, 130);
  const Hyperparameters theta = random_theta(3, 131);
  const VecchiaPlan plan = build_plan(ds, theta, 10, ConditioningStrategy::scaled_nn);
  const Vector terms = vecchia_term_loglik(ds, plan, theta);
  const double fwd = vecchia_loglik(ds, plan, theta);

  rng::Rng gen(7);
  const std::vector<int> perm = gen.permutation(ds.n());
  double shuffled = 0.0;
  for (int i : perm) shuffled += terms[i];
  CHECK(std::abs(shuffled - fwd) < 1e-9);
}

TEST_CASE("mini-batch sampling: contracts and uniformity") {
  const MiniBatch full = sample_minibatch(12, 12, 5);
  std::vector<int> want(12);
  std::iota(want.begin(), want.end(), 0);
  CHECK(full.indices == want);

  CHECK(sample_minibatch(10, 3, 8).indices == sample_minibatch(10, 3, 8).indices);
  CHECK_THROWS_AS(sample_minibatch(5, 6, 1), std::invalid_argument);

  std::vector<int> counts(10, 0);
  const int draws = 20000;
  for (int r = 0; r < draws; ++r)
    for (int i : sample_minibatch(10, 3, 100000 + r).indices) ++counts[i];
  for (int i = 0; i < 10; ++i)
    CHECK(std::abs(static_cast<double>(counts[i]) / draws - 0.3) < 0.02);
}

TEST_CASE("exhaustive subset enumeration shows the batch gradient is unbiased") {
  const int n = 8, take = 3;
  const Dataset ds = random_dataset(n, 2, 140);
  const Hyperparameters theta = random_theta(2, 141);
  const VecchiaPlan plan = build_plan(ds, theta, 2, ConditioningStrategy::scaled_nn);
  const auto active = active_parameters({0, 1});
  const Vector full = vecchia_grad(ds, plan, theta, active);

  Vector mean = Vector::Zero(full.size());
  int count = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        MiniBatch batch;
        batch.indices = {a, b, c};
        mean += vecchia_grad(ds, plan, theta, active, &batch);
        ++count;
      }
  CHECK(count == 56);
  mean /= count;
  const Vector want = (static_cast<double>(take) / n) * full;
  CHECK((mean - want).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("invalid batches are rejected") {
  const Dataset ds = random_dataset(10, 2, 150);
  const Hyperparameters theta = random_theta(2, 151);
  const VecchiaPlan plan = build_plan(ds, theta, 3, ConditioningStrategy::scaled_nn);
  MiniBatch bad;
  bad.indices = {3, 3};
  CHECK_THROWS_AS(vecchia_loglik(ds, plan, theta, &bad), std::invalid_argument);
  bad.indices = {5, 100};
  CHECK_THROWS_AS(vecchia_loglik(ds, plan, theta, &bad), std::invalid_argument);
}
