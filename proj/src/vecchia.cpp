/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/vecchia.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vgpr/kernel.hpp"
#include "vgpr/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vgpr {

MiniBatch sample_minibatch(int n, int take, std::uint64_t seed) {
  if (take < 1 || take > n) throw std::invalid_argument("sample_minibatch: need 1 <= batch size <= n");
  rng::Rng gen(rng::derive(seed, "minibatch"));
  return MiniBatch{gen.sample_without_replacement(n, take)};
}

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

// Everything one likelihood term needs from the joint block [cond..., i].
// Reused across terms within a thread to avoid per-term allocation.
struct TermWorkspace {
  Matrix Q;      // scaled distances
  Matrix Kunit;  // unit-variance kernel values
  Matrix J;      // sigma2*Kunit + tau2*I
  Matrix L;      // lower Cholesky factor of J
  Matrix Jinv;
  Matrix Jccinv;
  Matrix Xb;     // gathered covariate rows
  Vector w;      // gathered responses
  std::vector<Matrix> blocks;   // per-parameter derivative blocks
  std::vector<Matrix> joint_w;  // Jinv * block * Jinv
  std::vector<Matrix> cond_w;
  Matrix scratch_joint, scratch_cond;
};

void assemble_joint_block(const Matrix& X, const Vector& y, const VecchiaPlan& plan,
                          const Hyperparameters& theta, int pos, TermWorkspace& ws) {
  const std::vector<int>& c = plan.cond[pos];
  const int s = static_cast<int>(c.size());
  const int sz = s + 1;

  ws.Xb.resize(sz, X.cols());
  ws.w.resize(sz);
  for (int j = 0; j < s; ++j) {
    ws.Xb.row(j) = X.row(plan.perm[c[j]]);
    ws.w[j] = y[plan.perm[c[j]]];
  }
  ws.Xb.row(s) = X.row(plan.perm[pos]);
  ws.w[s] = y[plan.perm[pos]];

  ws.Q.resize(sz, sz);
  ws.Kunit.resize(sz, sz);
  for (int a = 0; a < sz; ++a) {
    ws.Q(a, a) = 0.0;
    ws.Kunit(a, a) = 1.0;
    const Vector xa = ws.Xb.row(a).transpose();
    for (int b = 0; b < a; ++b) {
      const double q = scaled_distance(xa, ws.Xb.row(b).transpose(), theta.sr);
      const double k = kernel_eval(q, 1.0, theta.family);
      ws.Q(a, b) = q;
      ws.Q(b, a) = q;
      ws.Kunit(a, b) = k;
      ws.Kunit(b, a) = k;
    }
  }
  ws.J = theta.sigma2 * ws.Kunit;
  ws.J.diagonal().array() += theta.tau2;
  ws.L = cholesky_with_jitter(ws.J, theta.sigma2);
}

// Derivative of the joint block with respect to one parameter.
void derivative_block(const TermWorkspace& ws, const Hyperparameters& theta, ParamRef p,
                      Matrix& out) {
  const int sz = static_cast<int>(ws.J.rows());
  out.resize(sz, sz);
  switch (p.kind) {
    case ParamRef::Kind::sigma2:
      out = ws.Kunit;
      return;
    case ParamRef::Kind::tau2:
      out.setIdentity();
      return;
    case ParamRef::Kind::sr: {
      for (int a = 0; a < sz; ++a) {
        out(a, a) = 0.0;
        for (int b = 0; b < a; ++b) {
          const double diff = ws.Xb(a, p.index) - ws.Xb(b, p.index);
          const double v = kernel_eval_du(ws.Q(a, b), theta.sigma2, theta.family) * diff * diff;
          out(a, b) = v;
          out(b, a) = v;
        }
      }
      return;
    }
  }
  throw std::logic_error("unknown parameter kind");
}

// One conditional term: log p(y_i | y_cond) plus, if requested, its gradient
// and FIM contributions over the active parameters (joint-block quantities
// minus conditioning-block quantities).
void compute_term(const Matrix& X, const Vector& y, const VecchiaPlan& plan,
                  const Hyperparameters& theta, const std::vector<ParamRef>& active, int pos,
                  bool want_grad, bool want_fim, TermWorkspace& ws, double& ll_out, double* grad_out,
                  double* fim_out) {
  assemble_joint_block(X, y, plan, theta, pos, ws);
  const int s = static_cast<int>(plan.cond[pos].size());
  const int sz = s + 1;

  // Forward solve: the first s entries coincide with the conditioning-block
  // solve because the leading block of L factors the leading block of J.
  const Vector u = ws.L.triangularView<Eigen::Lower>().solve(ws.w);
  ll_out = -0.5 * kLogTwoPi - std::log(ws.L(s, s)) - 0.5 * u[s] * u[s];

  if (!want_grad && !want_fim) return;

  const int np = static_cast<int>(active.size());
  ws.Jinv = Matrix::Identity(sz, sz);
  ws.L.triangularView<Eigen::Lower>().solveInPlace(ws.Jinv);
  ws.L.transpose().triangularView<Eigen::Upper>().solveInPlace(ws.Jinv);

  // Inverse of the conditioning block via the Schur-complement downdate of
  // the joint inverse.
  const Vector z = ws.Jinv * ws.w;
  Vector z_c;
  if (s > 0) {
    const Vector col = ws.Jinv.col(s).head(s);
    ws.Jccinv = ws.Jinv.topLeftCorner(s, s) - (col * col.transpose()) / ws.Jinv(s, s);
    z_c = ws.Jccinv * ws.w.head(s);
  }

  if (static_cast<int>(ws.blocks.size()) < np) ws.blocks.resize(np);
  for (int p = 0; p < np; ++p) derivative_block(ws, theta, active[p], ws.blocks[p]);

  if (want_grad) {
    for (int p = 0; p < np; ++p) {
      const Matrix& Jp = ws.blocks[p];
      double g = 0.5 * z.dot(Jp * z) - 0.5 * ws.Jinv.cwiseProduct(Jp).sum();
      if (s > 0) {
        const auto Jp_cc = Jp.topLeftCorner(s, s);
        g -= 0.5 * z_c.dot(Jp_cc * z_c) - 0.5 * ws.Jccinv.cwiseProduct(Jp_cc).sum();
      }
      grad_out[p] = g;
    }
  }

  if (want_fim) {
    if (static_cast<int>(ws.joint_w.size()) < np) {
      ws.joint_w.resize(np);
      ws.cond_w.resize(np);
    }
    for (int p = 0; p < np; ++p) {
      ws.scratch_joint.noalias() = ws.blocks[p] * ws.Jinv;
      ws.joint_w[p].noalias() = ws.Jinv * ws.scratch_joint;
      if (s > 0) {
        ws.scratch_cond.noalias() = ws.blocks[p].topLeftCorner(s, s) * ws.Jccinv;
        ws.cond_w[p].noalias() = ws.Jccinv * ws.scratch_cond;
      }
    }
    for (int p = 0; p < np; ++p) {
      for (int q = p; q < np; ++q) {
        double f = 0.5 * ws.joint_w[p].cwiseProduct(ws.blocks[q]).sum();
        if (s > 0) f -= 0.5 * ws.cond_w[p].cwiseProduct(ws.blocks[q].topLeftCorner(s, s)).sum();
        fim_out[p * np + q] = f;
        fim_out[q * np + p] = f;
      }
    }
  }
}

std::vector<int> term_positions(int n, const MiniBatch* batch) {
  if (!batch) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::vector<int> pos = batch->indices;
  for (std::size_t t = 1; t < pos.size(); ++t)
    if (pos[t] <= pos[t - 1]) throw std::invalid_argument("MiniBatch indices must be ascending and distinct");
  if (!pos.empty() && (pos.front() < 0 || pos.back() >= n))
    throw std::invalid_argument("MiniBatch index out of range");
  return pos;
}

}  // namespace

LikelihoodReport vecchia_evaluate(const Dataset& ds, const VecchiaPlan& plan,
                                  const Hyperparameters& theta, const std::vector<ParamRef>& active,
                                  bool want_grad, bool want_fim, const MiniBatch* batch,
                                  ExecPolicy policy) {
  if (plan.n() != ds.n()) throw std::invalid_argument("vecchia_evaluate: plan/dataset size mismatch");
  if (theta.sr.size() != ds.d()) throw std::invalid_argument("vecchia_evaluate: sr length mismatch");
  const std::vector<int> terms = term_positions(ds.n(), batch);
  const int nt = static_cast<int>(terms.size());
  const int np = static_cast<int>(active.size());

  Vector ll_buf(nt);
  Matrix grad_buf, fim_buf;
  if (want_grad) grad_buf.resize(np, nt);
  if (want_fim) fim_buf.resize(np * np, nt);

  bool failed = false;
  std::string error_msg;

  const auto run_term = [&](int t, TermWorkspace& ws) {
    compute_term(ds.X, ds.y, plan, theta, active, terms[t], want_grad, want_fim, ws, ll_buf[t],
                 want_grad ? grad_buf.col(t).data() : nullptr,
                 want_fim ? fim_buf.col(t).data() : nullptr);
  };

  if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      TermWorkspace ws;
#pragma omp for schedule(dynamic, 8)
      for (int t = 0; t < nt; ++t) {
        if (failed) continue;
        try {
          run_term(t, ws);
        } catch (const std::exception& e) {
#pragma omp critical
          {
            failed = true;
            error_msg = e.what();
          }
        }
      }
    }
#else
    policy = ExecPolicy::serial;
#endif
  }
  if (policy == ExecPolicy::serial) {
    TermWorkspace ws;
    for (int t = 0; t < nt; ++t) run_term(t, ws);
  }
  if (failed) throw NotPositiveDefiniteError(error_msg);

  // Deterministic reduction in ascending term order.
  LikelihoodReport rep;
  rep.loglik = 0.0;
  for (int t = 0; t < nt; ++t) rep.loglik += ll_buf[t];
  if (want_grad) {
    rep.grad = Vector::Zero(np);
    for (int t = 0; t < nt; ++t) rep.grad += grad_buf.col(t);
  }
  if (want_fim) {
    Vector acc = Vector::Zero(np * np);
    for (int t = 0; t < nt; ++t) acc += fim_buf.col(t);
    rep.fim = Eigen::Map<Matrix>(acc.data(), np, np);
  }
  return rep;
}

double vecchia_loglik(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                      const MiniBatch* batch, ExecPolicy policy) {
  return vecchia_evaluate(ds, plan, theta, {}, false, false, batch, policy).loglik;
}

Vector vecchia_grad(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                    const std::vector<ParamRef>& active, const MiniBatch* batch, ExecPolicy policy) {
  return vecchia_evaluate(ds, plan, theta, active, true, false, batch, policy).grad;
}

Matrix vecchia_fim(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                   const std::vector<ParamRef>& active, const MiniBatch* batch, ExecPolicy policy) {
  return vecchia_evaluate(ds, plan, theta, active, false, true, batch, policy).fim;
}

Vector vecchia_term_loglik(const Dataset& ds, const VecchiaPlan& plan, const Hyperparameters& theta,
                           const MiniBatch* batch, ExecPolicy policy) {
  if (plan.n() != ds.n()) throw std::invalid_argument("vecchia_term_loglik: plan/dataset size mismatch");
  const std::vector<int> terms = term_positions(ds.n(), batch);
  const int nt = static_cast<int>(terms.size());
  Vector ll_buf(nt);
  bool failed = false;
  std::string error_msg;

  const auto run_term = [&](int t, TermWorkspace& ws) {
    double dummy_grad = 0.0;
    (void)dummy_grad;
    compute_term(ds.X, ds.y, plan, theta, {}, terms[t], false, false, ws, ll_buf[t], nullptr, nullptr);
  };

  if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      TermWorkspace ws;
#pragma omp for schedule(dynamic, 8)
      for (int t = 0; t < nt; ++t) {
        if (failed) continue;
        try {
          run_term(t, ws);
        } catch (const std::exception& e) {
#pragma omp critical
          {
            failed = true;
            error_msg = e.what();
          }
        }
      }
    }
#else
    policy = ExecPolicy::serial;
#endif
  }
  if (policy == ExecPolicy::serial) {
    TermWorkspace ws;
    for (int t = 0; t < nt; ++t) run_term(t, ws);
  }
  if (failed) throw NotPositiveDefiniteError(error_msg);
  return ll_buf;
}

}  // namespace vgpr
