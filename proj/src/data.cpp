/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vgpr/csv.hpp"
#include "vgpr/kernel.hpp"
#include "vgpr/oracle.hpp"
#include "vgpr/ordering.hpp"
#include "vgpr/rng.hpp"

namespace vgpr {

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("Dataset: need n >= 1 and d >= 1");
  if (y.size() != X.rows()) throw std::invalid_argument("Dataset: y length != number of rows");
  if (!X.allFinite()) throw std::invalid_argument("Dataset: non-finite covariate entry");
  if (!y.allFinite()) throw std::invalid_argument("Dataset: non-finite response entry");
}

Dataset make_dataset(Matrix X, Vector y) {
  Dataset ds;
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.col_names.resize(ds.d());
  for (int l = 0; l < ds.d(); ++l) ds.col_names[l] = "x" + std::to_string(l + 1);
  ds.validate();
  return ds;
}

void SimulationSpec::validate() const {
  if (n < 1 || d < 1) throw std::invalid_argument("SimulationSpec: need n >= 1 and d >= 1");
  if (theta_true.sr.size() != d) throw std::invalid_argument("SimulationSpec: theta_true.sr length != d");
  theta_true.validate();
  if (covariate_mode == CovariateMode::correlated_normal && !(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("SimulationSpec: rho must be in [0, 1)");
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
  const csv::Table table = csv::read(path);
  int y_col = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == response_column) {
      y_col = static_cast<int>(c);
      break;
    }
  if (y_col < 0) {
    std::string cols;
    for (const auto& h : table.header) cols += (cols.empty() ? "" : ", ") + h;
    throw std::runtime_error("response column '" + response_column +
                             "' not found; available columns: " + cols);
  }
  if (table.header.size() < 2) throw std::runtime_error("file has no covariate columns: " + path);

  Dataset ds;
  const Eigen::Index n = table.values.rows();
  const Eigen::Index d = table.values.cols() - 1;
  ds.X.resize(n, d);
  ds.y = table.values.col(y_col);
  ds.response_name = response_column;
  Eigen::Index out_c = 0;
  for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
    if (c == y_col) continue;
    ds.X.col(out_c) = table.values.col(c);
    ds.col_names.push_back(table.header[c]);
    ++out_c;
  }
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::vector<std::string> header;
  header.push_back(ds.response_name);
  for (int l = 0; l < ds.d(); ++l)
    header.push_back(static_cast<std::size_t>(l) < ds.col_names.size() ? ds.col_names[l]
                                                                       : "x" + std::to_string(l + 1));
  Matrix values(ds.n(), ds.d() + 1);
  values.col(0) = ds.y;
  values.rightCols(ds.d()) = ds.X;
  csv::write(path, header, values);
}

namespace {

double sample_sd(const Vector& v, double mean) {
  const Eigen::Index n = v.size();
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = v[i] - mean;
    ss += c * c;
  }
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace

Dataset standardize(const Dataset& ds) {
  if (ds.standardized) throw std::logic_error("standardize: dataset is already standardized");
  ds.validate();
  Dataset out = ds;
  out.standardized = true;
  out.col_means.resize(ds.d());
  out.col_sds.resize(ds.d());
  out.constant_cols.assign(ds.d(), 0);
  for (int l = 0; l < ds.d(); ++l) {
    const double mean = ds.X.col(l).mean();
    double sd = sample_sd(ds.X.col(l), mean);
    if (sd <= 0.0) {
      out.constant_cols[l] = 1;
      sd = 1.0;
    }
    out.col_means[l] = mean;
    out.col_sds[l] = sd;
    out.X.col(l) = (ds.X.col(l).array() - mean) / sd;
  }
  out.y_mean = ds.y.mean();
  out.y_sd = sample_sd(ds.y, out.y_mean);
  if (out.y_sd <= 0.0) out.y_sd = 1.0;
  out.y = (ds.y.array() - out.y_mean) / out.y_sd;
  return out;
}

double destandardize_y(const Dataset& ds, double y_std) { return y_std * ds.y_sd + ds.y_mean; }

Matrix apply_standardization(const Dataset& ref, const Matrix& X_raw) {
  if (!ref.standardized) throw std::logic_error("apply_standardization: reference is not standardized");
  if (X_raw.cols() != ref.col_means.size())
    throw std::invalid_argument("apply_standardization: column count mismatch");
  Matrix out = X_raw;
  for (Eigen::Index l = 0; l < X_raw.cols(); ++l)
    out.col(l) = (X_raw.col(l).array() - ref.col_means[l]) / ref.col_sds[l];
  return out;
}

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out = ds;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), ds.d());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = ds.X.row(rows[i]);
    out.y[static_cast<Eigen::Index>(i)] = ds.y[rows[i]];
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> train_oos_split(const Dataset& ds, std::uint64_t seed,
                                            int oos_size_override) {
  if (ds.n() < 8) throw std::invalid_argument("train_oos_split: need n >= 8");
  const int n = ds.n();
  int oos_size = oos_size_override > 0 ? oos_size_override : std::min(n / 4, 5000);
  if (oos_size >= n) throw std::invalid_argument("train_oos_split: OOS size must leave training rows");

  rng::Rng gen(rng::derive(seed, "train_oos_split"));
  const std::vector<int> oos_rows = gen.sample_without_replacement(n, oos_size);
  std::vector<std::uint8_t> in_oos(n, 0);
  for (int i : oos_rows) in_oos[i] = 1;
  std::vector<int> train_rows;
  train_rows.reserve(n - oos_size);
  for (int i = 0; i < n; ++i)
    if (!in_oos[i]) train_rows.push_back(i);
  return {take_rows(ds, train_rows), take_rows(ds, oos_rows)};
}

Matrix simulate_covariates(const SimulationSpec& spec, std::uint64_t seed) {
  Matrix X(spec.n, spec.d);
  if (spec.covariate_mode == CovariateMode::independent_latin_hypercube) {
    // Each column: a random permutation of one uniform draw per stratum.
    for (int l = 0; l < spec.d; ++l) {
      rng::Rng gen(rng::derive(seed, "lhs_column", static_cast<std::uint64_t>(l)));
      const std::vector<int> perm = gen.permutation(spec.n);
      for (int i = 0; i < spec.n; ++i)
        X(i, l) = (static_cast<double>(perm[i]) + gen.uniform()) / static_cast<double>(spec.n);
    }
  } else {
    // Constant cross-column correlation rho via a shared row factor, then
    // each column rescaled to unit sample sd.
    rng::Rng gen(rng::derive(seed, "correlated_normal"));
    const double a = std::sqrt(spec.rho);
    const double b = std::sqrt(1.0 - spec.rho);
    Vector shared(spec.n);
    for (int i = 0; i < spec.n; ++i) shared[i] = gen.normal();
    for (int l = 0; l < spec.d; ++l)
      for (int i = 0; i < spec.n; ++i) X(i, l) = a * shared[i] + b * gen.normal();
    for (int l = 0; l < spec.d; ++l) {
      const double mean = X.col(l).mean();
      const double sd = sample_sd(X.col(l), mean);
      if (sd > 0.0) X.col(l) /= sd;
    }
  }
  return X;
}

Vector simulate_responses_dense(const Matrix& X, const Hyperparameters& theta, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  if (n > 8192) throw std::invalid_argument("simulate_responses_dense: n exceeds dense guard (8192)");
  const Matrix L = cholesky_with_jitter(dense_covariance(X, theta), theta.sigma2);
  rng::Rng gen(rng::derive(seed, "responses"));
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = gen.normal();
  return L * z;
}

Dataset simulate(const SimulationSpec& spec) {
  spec.validate();
  Matrix X = simulate_covariates(spec, spec.seed);
  Vector y;
  if (spec.n <= 8192) {
    y = simulate_responses_dense(X, spec.theta_true, spec.seed);
  } else {
    // Approximate draw through the sparse Vecchia inverse-Cholesky factor:
    // solve U^T y_perm = z so that cov(y_perm) = (U U^T)^{-1}.
    Dataset tmp;
    tmp.X = X;
    tmp.y = Vector::Zero(spec.n);
    const VecchiaPlan plan = build_plan(tmp, spec.theta_true, 100, ConditioningStrategy::scaled_nn);
    const Eigen::SparseMatrix<double> U = vecchia_implied_precision_factor(plan, tmp, spec.theta_true);
    rng::Rng gen(rng::derive(spec.seed, "responses"));
    Vector z(spec.n);
    for (int i = 0; i < spec.n; ++i) z[i] = gen.normal();
    const Eigen::SparseMatrix<double> Ut = U.transpose();
    const Vector y_perm = Ut.triangularView<Eigen::Lower>().solve(z);
    y.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) y[plan.perm[i]] = y_perm[i];
  }
  return make_dataset(std::move(X), std::move(y));
}

}  // namespace vgpr
