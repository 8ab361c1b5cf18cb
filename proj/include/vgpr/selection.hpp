/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vgpr/data.hpp"
#include "vgpr/optimizer.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/penalty.hpp"
#include "vgpr/types.hpp"
#include "vgpr/vecchia.hpp"

namespace vgpr {

/// Covariates currently allowed a nonzero squared relevance, with the event
/// log of additions ('+') and removals ('-').
struct CandidateSet {
  std::vector<int> zeta;  // ascending
  std::vector<std::pair<char, int>> events;

  bool contains(int l) const;
  void add(int l);
  void remove(int l);
};

/// One snapshot per penalty level along the regularization path.
struct PathRecord {
  double lambda = 0.0;
  Hyperparameters theta;  // unselected squared relevances reported as 0
  std::vector<int> zeta;
  double oos_rmse = 0.0;
  double wall_time = 0.0;  // seconds
  bool is_stop = false;    // the best-OOS record the path rolls back to
};

struct FitConfig {
  int m = 100;
  int k = 3;
  double gamma = 0.25;
  int kappa = 0;
  int batch = 0;  // 0 = full batch
  std::uint64_t seed = 1;
  KernelFamily family = KernelFamily::matern25;
  OptimizerConfig opt;        // opt.max_iter <= 0 means 100 full-batch / 200 mini-batch
  double oos_improve_tol = 0.01;
  double lambda_floor_factor = 1e-6;
  int oos_size_override = -1;
  ExecPolicy policy = ExecPolicy::parallel;
  double sr_floor = 1e-8;   // screening value for unselected squared relevances
  double sr_init = 0.01;    // entry value for newly selected covariates (0.1^2)
  double sigma2_init = 0.25;
  double tau2_init = 1e-4;
  double param_floor = 1e-8;  // lower bound for sigma2 and tau2

  OptimizerConfig optimizer_config() const;
};

/// Per-iteration optimizer trace with path context, for trace.csv.
struct TraceRow {
  double lambda = 0.0;
  int fb_step = 0;
  int iter = 0;
  double objective = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  int active_sr = 0;
  double min_bound_slack = 0.0;  // min_i (theta_i - b_i) at the iterate; >= 0 iff feasible
};

/// Full-d gradient with respect to the squared relevances at the current
/// parameters (unselected entries at the screening floor); returns the k
/// largest coefficients outside zeta, ties to the lower index.
std::vector<int> sr_gradient_screen(const Dataset& ds, const VecchiaPlan& plan,
                                    const Hyperparameters& theta, const std::vector<int>& zeta,
                                    int k, const MiniBatch* batch = nullptr,
                                    ExecPolicy policy = ExecPolicy::parallel);

/// RMSE of posterior means against held-out responses, standardized scale.
double oos_rmse(const Dataset& train, const Hyperparameters& theta, const Dataset& oos, int m,
                ExecPolicy policy = ExecPolicy::parallel);

/// theta with squared relevances outside zeta set to exactly zero.
Hyperparameters report_theta(const Hyperparameters& theta_full, const std::vector<int>& zeta);

/// Mutable state threaded through the selection driver.
struct FitState {
  Hyperparameters theta;  // full-d; unselected squared relevances at the floor
  CandidateSet cand;
  PenaltyState penalty;
  VecchiaPlan plan;
  double oos = 0.0;
  std::uint64_t batch_counter = 0;
};

/// One forward-backward pass at the penalty level in state.penalty.lambda:
/// screen k covariates, rebuild the plan at the refreshed relevances, run
/// QCCD, drop exact zeros, and stop (rolling back the last addition) when the
/// OOS RMSE improves by less than oos_improve_tol. Returns the achieved RMSE.
double forward_backward(const Dataset& train, const Dataset& oos, FitState& state,
                        const FitConfig& cfg, double lambda_for_trace = 0.0,
                        std::vector<TraceRow>* trace = nullptr);

/// Regularization-path driver: lambda starts at the training size (doubling
/// until the first fitted model is empty), halves per step, and stops on the
/// OOS rule or the lambda floor. The best-OOS record is marked is_stop.
std::vector<PathRecord> vgpr_path(const Dataset& ds, const FitConfig& cfg,
                                  std::vector<TraceRow>* trace = nullptr);

/// Penalized QCCD over a fixed candidate set, rebuilding the plan from the
/// current relevances between rounds. The standalone estimation entry point
/// (no covariate screening).
struct QccdFitResult {
  Hyperparameters theta;
  std::vector<QccdIterTrace> trace;  // concatenated across rounds
  std::vector<int> round_offsets;
};
QccdFitResult fit_qccd(const Dataset& train, const Hyperparameters& theta0,
                       const std::vector<int>& zeta, PenaltyState penalty, const FitConfig& cfg,
                       int rescale_rounds, int iters_per_round);

void write_path_csv(const std::vector<PathRecord>& records, const std::string& path);
void write_relevance_path_csv(const std::vector<PathRecord>& records, int d, const std::string& path);
void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);

}  // namespace vgpr
