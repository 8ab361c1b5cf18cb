/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */

// Timings of the OpenMP per-term kernels against the serial reference, and
// the linear scaling of the mini-batch gradient in the batch size.

#include <chrono>
#include <cstdio>
#include <functional>

#include "vgpr/data.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/predict.hpp"
#include "vgpr/selection.hpp"
#include "vgpr/vecchia.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace vgpr;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main() {
  const int n = 3000, d = 10, m = 30;
  SimulationSpec spec;
  spec.n = n;
  spec.d = d;
  spec.theta_true.sigma2 = 1.0;
  spec.theta_true.tau2 = 0.05 * 0.05;
  spec.theta_true.sr = Vector::Zero(d);
  const double r[5] = {10, 5, 2, 1, 0.5};
  for (int l = 0; l < 5; ++l) spec.theta_true.sr[l] = r[l] * r[l];
  spec.seed = 7;
  const Dataset ds = simulate(spec);
  const Hyperparameters theta = spec.theta_true;
  const VecchiaPlan plan = build_plan(ds, theta, m, ConditioningStrategy::scaled_nn);
  const auto active = active_parameters({0, 1, 2, 3, 4});

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("n=%d d=%d m=%d, %zu active parameters\n\n", n, d, m, active.size());
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial ms", "parallel ms", "speedup");

  const auto row = [&](const char* name, const std::function<void(ExecPolicy)>& fn) {
    const double ts = time_ms([&] { fn(ExecPolicy::serial); }, 3);
    const double tp = time_ms([&] { fn(ExecPolicy::parallel); }, 3);
    std::printf("%-28s %12.2f %12.2f %7.2fx\n", name, ts, tp, ts / tp);
  };

  row("vecchia_loglik", [&](ExecPolicy p) { vecchia_loglik(ds, plan, theta, nullptr, p); });
  row("vecchia_grad", [&](ExecPolicy p) { vecchia_grad(ds, plan, theta, active, nullptr, p); });
  row("vecchia_fim", [&](ExecPolicy p) { vecchia_fim(ds, plan, theta, active, nullptr, p); });
  row("vecchia_grad+fim", [&](ExecPolicy p) {
    vecchia_evaluate(ds, plan, theta, active, true, true, nullptr, p);
  });

  Matrix X_test = ds.X.topRows(500);
  row("predict (500 points)", [&](ExecPolicy p) {
    predict(ds, theta, theta.sr, X_test, m, true, false, p);
  });
  row("nn_conditioning", [&](ExecPolicy p) {
    // Serial path: cap OpenMP to one thread for the duration.
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    if (p == ExecPolicy::serial) omp_set_num_threads(1);
    nn_conditioning(ds, plan.perm, theta.sr, m);
    omp_set_num_threads(saved);
#else
    (void)p;
    nn_conditioning(ds, plan.perm, theta.sr, m);
#endif
  });

  std::printf("\nmini-batch gradient scaling (fixed m=%d):\n", m);
  std::printf("%-12s %12s %14s\n", "batch", "median ms", "ratio to prev");
  double prev = 0.0;
  for (const int take : {256, 512, 1024}) {
    const MiniBatch batch = sample_minibatch(n, take, 11);
    const double t = time_ms([&] { vecchia_grad(ds, plan, theta, active, &batch, ExecPolicy::serial); }, 5);
    std::printf("%-12d %12.2f %14s\n", take, t,
                prev > 0.0 ? std::to_string(t / prev).substr(0, 5).c_str() : "-");
    prev = t;
  }
  return 0;
}
