/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "vgpr/csv.hpp"
#include "vgpr/kernel.hpp"
#include "vgpr/predict.hpp"
#include "vgpr/rng.hpp"

namespace vgpr {

bool CandidateSet::contains(int l) const {
  return std::binary_search(zeta.begin(), zeta.end(), l);
}

void CandidateSet::add(int l) {
  zeta.insert(std::upper_bound(zeta.begin(), zeta.end(), l), l);
  events.emplace_back('+', l);
}

void CandidateSet::remove(int l) {
  const auto it = std::lower_bound(zeta.begin(), zeta.end(), l);
  if (it == zeta.end() || *it != l) throw std::logic_error("CandidateSet::remove: index not present");
  zeta.erase(it);
  events.emplace_back('-', l);
}

OptimizerConfig FitConfig::optimizer_config() const {
  OptimizerConfig oc = opt;
  oc.batch_size = batch;
  if (oc.max_iter <= 0) oc.max_iter = batch > 0 ? 200 : 100;
  return oc;
}

std::vector<int> sr_gradient_screen(const Dataset& ds, const VecchiaPlan& plan,
                                    const Hyperparameters& theta, const std::vector<int>& zeta,
                                    int k, const MiniBatch* batch, ExecPolicy policy) {
  const int d = ds.d();
  if (k < 1) throw std::invalid_argument("sr_gradient_screen: k must be >= 1");
  if (static_cast<int>(zeta.size()) + k > d)
    throw std::invalid_argument("sr_gradient_screen: |zeta| + k exceeds d");

  std::vector<ParamRef> all_sr;
  all_sr.reserve(d);
  for (int l = 0; l < d; ++l) all_sr.push_back(ParamRef::Sr(l));
  const Vector grad = vecchia_grad(ds, plan, theta, all_sr, batch, policy);

  std::vector<std::uint8_t> selected(d, 0);
  for (int l : zeta) selected[l] = 1;
  std::vector<int> outside;
  outside.reserve(d - zeta.size());
  for (int l = 0; l < d; ++l)
    if (!selected[l]) outside.push_back(l);
  std::stable_sort(outside.begin(), outside.end(),
                   [&grad](int a, int b) { return grad[a] > grad[b]; });
  outside.resize(k);
  return outside;
}

Hyperparameters report_theta(const Hyperparameters& theta_full, const std::vector<int>& zeta) {
  Hyperparameters out = theta_full;
  out.sr.setZero();
  for (int l : zeta) out.sr[l] = theta_full.sr[l];
  return out;
}

double oos_rmse(const Dataset& train, const Hyperparameters& theta, const Dataset& oos, int m,
                ExecPolicy policy) {
  const int m_eff = std::min(m, train.n());
  const Prediction pred = predict(train, theta, theta.sr, oos.X, m_eff, false, false, policy);
  return std::sqrt((pred.mean - oos.y).squaredNorm() / static_cast<double>(oos.n()));
}

namespace {

// Bridge objective over the active parameters [sigma2, sr_zeta..., tau2].
struct PenalizedObjective {
  const Dataset& train;
  const VecchiaPlan& plan;
  const FitConfig& cfg;
  Hyperparameters& theta_full;  // written back on accept
  const std::vector<int>& zeta;
  PenaltyState& penalty;
  std::uint64_t& batch_counter;
  std::optional<MiniBatch> batch;
  std::vector<ParamRef> active;

  PenalizedObjective(const Dataset& train_in, const VecchiaPlan& plan_in, const FitConfig& cfg_in,
                     Hyperparameters& theta_in, const std::vector<int>& zeta_in,
                     PenaltyState& penalty_in, std::uint64_t& counter_in)
      : train(train_in), plan(plan_in), cfg(cfg_in), theta_full(theta_in), zeta(zeta_in),
        penalty(penalty_in), batch_counter(counter_in) {
    active = active_parameters(zeta);
  }

  Vector pack() const {
    Vector a(zeta.size() + 2);
    a[0] = theta_full.sigma2;
    for (std::size_t j = 0; j < zeta.size(); ++j) a[1 + j] = theta_full.sr[zeta[j]];
    a[a.size() - 1] = theta_full.tau2;
    return a;
  }

  Hyperparameters unpack(const Vector& a) const {
    Hyperparameters th = theta_full;
    th.sigma2 = a[0];
    for (std::size_t j = 0; j < zeta.size(); ++j) th.sr[zeta[j]] = a[1 + j];
    th.tau2 = a[a.size() - 1];
    return th;
  }

  Vector bounds() const {
    Vector b = Vector::Zero(zeta.size() + 2);
    b[0] = cfg.param_floor;
    b[b.size() - 1] = cfg.param_floor;
    return b;
  }

  Vector sr_active(const Vector& a) const { return a.segment(1, static_cast<Eigen::Index>(zeta.size())); }

  void draw_batch() {
    batch = sample_minibatch(train.n(), cfg.batch,
                             rng::derive(cfg.seed, "qccd_batch", batch_counter++));
  }

  Objective make() {
    Objective obj;
    obj.value = [this](const Vector& a) {
      const Hyperparameters th = unpack(a);
      const double ll = vecchia_loglik(train, plan, th, batch ? &*batch : nullptr, cfg.policy);
      return -ll + penalty_value(penalty, zeta, sr_active(a));
    };
    obj.grad_and_curvature = [this](const Vector& a, Vector& g, Matrix& H) {
      const Hyperparameters th = unpack(a);
      const LikelihoodReport rep =
          vecchia_evaluate(train, plan, th, active, true, true, batch ? &*batch : nullptr, cfg.policy);
      g = -rep.grad;
      const Vector pg = penalty_grad(penalty, zeta, sr_active(a));
      g.segment(1, static_cast<Eigen::Index>(zeta.size())) += pg;
      H = rep.fim;
    };
    if (cfg.batch > 0) obj.next_batch = [this]() { draw_batch(); };
    obj.on_accept = [this](const Vector& a) {
      theta_full = unpack(a);
      update_history(penalty, theta_full.sr);
    };
    return obj;
  }
};

}  // namespace

double forward_backward(const Dataset& train, const Dataset& oos, FitState& state,
                        const FitConfig& cfg, double lambda_for_trace,
                        std::vector<TraceRow>* trace) {
  const int d = train.d();
  const OptimizerConfig oc = cfg.optimizer_config();

  struct Snapshot {
    Hyperparameters theta;
    CandidateSet cand;
    PenaltyState penalty;
    VecchiaPlan plan;
    double rmse;
  };

  state.oos = oos_rmse(train, report_theta(state.theta, state.cand.zeta), oos, cfg.m, cfg.policy);
  Snapshot best{state.theta, state.cand, state.penalty, state.plan, state.oos};

  int fb_step = 0;
  while (true) {
    const int remaining = d - static_cast<int>(state.cand.zeta.size());
    if (remaining == 0) break;
    const int kk = std::min(cfg.k, remaining);

    // Forward: screen on a fresh mini-batch (full data when batch == 0).
    std::optional<MiniBatch> screen_batch;
    if (cfg.batch > 0)
      screen_batch = sample_minibatch(train.n(), cfg.batch,
                                      rng::derive(cfg.seed, "screen_batch", state.batch_counter++));
    const std::vector<int> added = sr_gradient_screen(
        train, state.plan, state.theta, state.cand.zeta, kk, screen_batch ? &*screen_batch : nullptr,
        cfg.policy);
    for (int l : added) {
      state.cand.add(l);
      state.theta.sr[l] = cfg.sr_init;
    }

    // r_tilde <- r: the plan follows the refreshed relevances.
    state.plan = build_plan(train, state.theta, std::min(cfg.m, train.n() - 1),
                            ConditioningStrategy::scaled_nn);

    PenalizedObjective pobj(train, state.plan, cfg, state.theta, state.cand.zeta, state.penalty,
                            state.batch_counter);
    if (cfg.batch > 0) pobj.draw_batch();
    Objective obj = pobj.make();
    const QccdResult qr = qccd(obj, pobj.pack(), pobj.bounds(), oc);
    if (trace) {
      const Vector bounds = pobj.bounds();
      for (const auto& row : qr.trace) {
        int active_sr = 0;
        for (std::size_t j = 0; j < state.cand.zeta.size(); ++j)
          if (row.theta_after[1 + static_cast<Eigen::Index>(j)] > 0.0) ++active_sr;
        trace->push_back({lambda_for_trace, fb_step, row.iter, row.obj_after, row.alpha, row.beta,
                          active_sr, (row.theta_after - bounds).minCoeff()});
      }
    }

    // Backward: drop covariates optimized to exactly zero.
    const std::vector<int> zeta_now = state.cand.zeta;
    for (int l : zeta_now) {
      if (state.theta.sr[l] == 0.0) {
        state.cand.remove(l);
        state.theta.sr[l] = cfg.sr_floor;
      }
    }

    const double rmse = oos_rmse(train, report_theta(state.theta, state.cand.zeta), oos, cfg.m,
                                 cfg.policy);
    ++fb_step;
    if (rmse < best.rmse * (1.0 - cfg.oos_improve_tol)) {
      best = {state.theta, state.cand, state.penalty, state.plan, rmse};
      continue;
    }
    // Roll back the non-improving addition.
    state.theta = best.theta;
    state.cand = best.cand;
    state.penalty = best.penalty;
    state.plan = best.plan;
    break;
  }
  state.oos = best.rmse;
  return best.rmse;
}

std::vector<PathRecord> vgpr_path(const Dataset& ds, const FitConfig& cfg,
                                  std::vector<TraceRow>* trace) {
  if (!ds.standardized) throw std::invalid_argument("vgpr_path: dataset must be standardized");
  auto [train, oos] = train_oos_split(ds, rng::derive(cfg.seed, "split"), cfg.oos_size_override);
  const int d = train.d();
  const double n_train = static_cast<double>(train.n());

  const auto fresh_state = [&](double lambda) {
    FitState st;
    st.theta.sigma2 = cfg.sigma2_init;
    st.theta.tau2 = cfg.tau2_init;
    st.theta.family = cfg.family;
    st.theta.sr = Vector::Constant(d, cfg.sr_floor);
    st.penalty = PenaltyState(lambda, cfg.gamma, cfg.kappa, d);
    st.plan = build_plan(train, st.theta, std::min(cfg.m, train.n() - 1),
                         ConditioningStrategy::scaled_nn);
    return st;
  };

  std::vector<PathRecord> records;
  const auto run_lambda = [&](FitState& st, double lambda) {
    st.penalty.lambda = lambda;
    const auto t0 = std::chrono::steady_clock::now();
    const double rmse = forward_backward(train, oos, st, cfg, lambda, trace);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    records.push_back({lambda, report_theta(st.theta, st.cand.zeta), st.cand.zeta, rmse, secs, false});
  };

  // lambda0 = n must imply an empty model; double until it does.
  double lambda = n_train;
  FitState state = fresh_state(lambda);
  for (int doublings = 0;; ++doublings) {
    if (doublings > 60) throw std::runtime_error("vgpr_path: could not reach an empty model");
    run_lambda(state, lambda);
    if (state.cand.zeta.empty()) break;
    records.clear();
    if (trace) trace->clear();
    lambda *= 2.0;
    state = fresh_state(lambda);
  }

  const double lambda_floor = cfg.lambda_floor_factor * n_train;
  bool any_selection = false;
  std::size_t best_idx = 0;
  double best_rmse = records[0].oos_rmse;
  while (true) {
    lambda /= 2.0;
    if (lambda < lambda_floor) break;
    run_lambda(state, lambda);
    const PathRecord& rec = records.back();
    if (!rec.zeta.empty()) any_selection = true;
    if (rec.oos_rmse < best_rmse * (1.0 - cfg.oos_improve_tol)) {
      best_rmse = rec.oos_rmse;
      best_idx = records.size() - 1;
    } else if (any_selection) {
      break;
    }
  }
  records[best_idx].is_stop = true;
  return records;
}

QccdFitResult fit_qccd(const Dataset& train, const Hyperparameters& theta0,
                       const std::vector<int>& zeta, PenaltyState penalty, const FitConfig& cfg,
                       int rescale_rounds, int iters_per_round) {
  QccdFitResult out;
  out.theta = theta0;
  std::uint64_t counter = 0;
  OptimizerConfig oc = cfg.optimizer_config();
  oc.max_iter = iters_per_round;
  std::vector<int> zeta_sorted = zeta;
  std::sort(zeta_sorted.begin(), zeta_sorted.end());

  for (int round = 0; round < rescale_rounds; ++round) {
    const VecchiaPlan plan = build_plan(train, out.theta, std::min(cfg.m, train.n() - 1),
                                        ConditioningStrategy::scaled_nn);
    PenalizedObjective pobj(train, plan, cfg, out.theta, zeta_sorted, penalty, counter);
    if (cfg.batch > 0) pobj.draw_batch();
    Objective obj = pobj.make();
    const QccdResult qr = qccd(obj, pobj.pack(), pobj.bounds(), oc);
    out.round_offsets.push_back(static_cast<int>(out.trace.size()));
    out.trace.insert(out.trace.end(), qr.trace.begin(), qr.trace.end());
  }
  return out;
}

void write_path_csv(const std::vector<PathRecord>& records, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write file: " + path);
  outf << "lambda,oos_rmse,n_selected,selected_indices,sigma2,tau2,wall_time,is_stop\n";
  for (const auto& r : records) {
    std::string sel;
    for (std::size_t j = 0; j < r.zeta.size(); ++j)
      sel += (j ? ";" : "") + std::to_string(r.zeta[j] + 1);
    outf << csv::format_double(r.lambda) << ',' << csv::format_double(r.oos_rmse) << ','
         << r.zeta.size() << ',' << sel << ',' << csv::format_double(r.theta.sigma2) << ','
         << csv::format_double(r.theta.tau2) << ',' << csv::format_double(r.wall_time) << ','
         << (r.is_stop ? 1 : 0) << '\n';
  }
}

void write_relevance_path_csv(const std::vector<PathRecord>& records, int d,
                              const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write file: " + path);
  outf << "lambda";
  for (int l = 0; l < d; ++l) outf << ",sr_" << (l + 1);
  outf << '\n';
  for (const auto& r : records) {
    outf << csv::format_double(r.lambda);
    for (int l = 0; l < d; ++l) outf << ',' << csv::format_double(r.theta.sr[l]);
    outf << '\n';
  }
}

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write file: " + path);
  outf << "lambda,fb_step,iter,objective,alpha,beta,active_sr\n";
  for (const auto& r : rows)
    outf << csv::format_double(r.lambda) << ',' << r.fb_step << ',' << r.iter << ','
         << csv::format_double(r.objective) << ',' << csv::format_double(r.alpha) << ','
         << csv::format_double(r.beta) << ',' << r.active_sr << '\n';
}

}  // namespace vgpr
