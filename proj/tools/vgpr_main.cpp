/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vgpr/csv.hpp"
#include "vgpr/data.hpp"
#include "vgpr/model_io.hpp"
#include "vgpr/oracle.hpp"
#include "vgpr/predict.hpp"
#include "vgpr/selection.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace vgpr;

Hyperparameters default_truth(int d) {
  // sigma2 = 1, tau2 = 0.05^2, squared relevances (10,5,2,1,0.5)^2 then zeros.
  Hyperparameters theta;
  theta.sigma2 = 1.0;
  theta.tau2 = 0.05 * 0.05;
  theta.sr = Vector::Zero(d);
  const double r[5] = {10.0, 5.0, 2.0, 1.0, 0.5};
  for (int l = 0; l < std::min(d, 5); ++l) theta.sr[l] = r[l] * r[l];
  return theta;
}

int cmd_simulate(int n, int d, const std::string& mode, double rho, std::uint64_t seed,
                 const std::string& out) {
  SimulationSpec spec;
  spec.n = n;
  spec.d = d;
  spec.theta_true = default_truth(d);
  spec.covariate_mode =
      mode == "dep" ? CovariateMode::correlated_normal : CovariateMode::independent_latin_hypercube;
  spec.rho = rho;
  spec.seed = seed;
  spec.validate();

  const Dataset ds = simulate(spec);
  save_csv(ds, out + ".csv");

  nlohmann::json truth;
  truth["n"] = n;
  truth["d"] = d;
  truth["mode"] = mode;
  truth["rho"] = rho;
  truth["seed"] = seed;
  truth["theta_true"] = {{"sigma2", spec.theta_true.sigma2}, {"tau2", spec.theta_true.tau2}};
  nlohmann::json sr = nlohmann::json::array();
  std::vector<int> support;
  for (int l = 0; l < d; ++l) {
    sr.push_back(spec.theta_true.sr[l]);
    if (spec.theta_true.sr[l] > 0.0) support.push_back(l + 1);
  }
  truth["theta_true"]["sr"] = sr;
  truth["true_support"] = support;
  std::ofstream tf(out + "_truth.json");
  if (!tf) throw std::runtime_error("cannot write file: " + out + "_truth.json");
  tf << truth.dump(2) << '\n';

  std::cout << "wrote " << out << ".csv and " << out << "_truth.json\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& response, FitConfig cfg,
            const std::string& out_dir) {
  const Dataset raw = load_csv(data_path, response);
  const Dataset ds = standardize(raw);
  if (cfg.batch > ds.n()) throw std::runtime_error("batch size exceeds the number of observations");

  std::filesystem::create_directories(out_dir);
  std::vector<TraceRow> trace;
  const std::vector<PathRecord> records = vgpr_path(ds, cfg, &trace);

  const PathRecord* stop = &records.front();
  for (const auto& r : records)
    if (r.is_stop) stop = &r;

  ModelFile model;
  model.theta = stop->theta;
  model.zeta = stop->zeta;
  model.lambda = stop->lambda;
  model.oos_rmse = stop->oos_rmse;
  model.col_means = ds.col_means;
  model.col_sds = ds.col_sds;
  model.y_mean = ds.y_mean;
  model.y_sd = ds.y_sd;
  model.col_names = ds.col_names;
  model.response_name = ds.response_name;
  model.train_data_path = data_path;
  model.config = cfg;

  save_model(model, out_dir + "/model.json");
  write_path_csv(records, out_dir + "/path.csv");
  write_relevance_path_csv(records, ds.d(), out_dir + "/relevance_path.csv");
  write_trace_csv(trace, out_dir + "/trace.csv");

  std::cout << "stopping record: lambda=" << stop->lambda << " oos_rmse=" << stop->oos_rmse
            << " selected=" << stop->zeta.size() << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, int m_flag,
                bool latent, const std::string& out) {
  const ModelFile model = load_model(model_path);

  // Rebuild the standardized training set with the stored statistics.
  Dataset train = load_csv(model.train_data_path, model.response_name);
  if (train.col_names != model.col_names)
    throw std::runtime_error("training file columns changed since the model was fitted");
  train.standardized = true;
  train.col_means = model.col_means;
  train.col_sds = model.col_sds;
  train.y_mean = model.y_mean;
  train.y_sd = model.y_sd;
  train.X = apply_standardization(train, train.X);
  train.y = (train.y.array() - model.y_mean) / model.y_sd;

  const csv::Table test = csv::read(data_path);
  // Gather the model's covariate columns by name; the response is optional.
  Matrix X_test(test.values.rows(), static_cast<Eigen::Index>(model.col_names.size()));
  for (std::size_t c = 0; c < model.col_names.size(); ++c) {
    int col = -1;
    for (std::size_t h = 0; h < test.header.size(); ++h)
      if (test.header[h] == model.col_names[c]) {
        col = static_cast<int>(h);
        break;
      }
    if (col < 0) throw std::runtime_error("test data is missing column '" + model.col_names[c] + "'");
    X_test.col(static_cast<Eigen::Index>(c)) = test.values.col(col);
  }
  X_test = apply_standardization(train, X_test);

  const int m = m_flag > 0 ? std::min(m_flag, train.n()) : std::min(model.config.m, train.n());
  const Prediction pred = predict(train, model.theta, model.theta.sr, X_test, m, true, latent);

  Matrix outm(X_test.rows(), 3);
  for (Eigen::Index i = 0; i < X_test.rows(); ++i) {
    outm(i, 0) = static_cast<double>(i);
    outm(i, 1) = pred.mean[i] * model.y_sd + model.y_mean;
    outm(i, 2) = pred.variance[i] * model.y_sd * model.y_sd;
  }
  csv::write(out, {"row_id", "mean", "variance"}, outm);
  std::cout << "wrote " << out << " (" << X_test.rows() << " rows)\n";
  return 0;
}

int cmd_benchmark_kl(int n, int d, std::vector<int> m_list, std::vector<std::string> strategy_names,
                     int reps, std::uint64_t seed, const std::string& out) {
  SimulationSpec spec;
  spec.n = n;
  spec.d = d;
  spec.theta_true = default_truth(d);
  spec.theta_true.tau2 = 0.0;
  spec.seed = seed;
  spec.validate();
  if (n > kDenseGuard) throw std::runtime_error("n exceeds the dense oracle guard (8192)");

  for (int& m : m_list) {
    if (m >= n) {
      std::cerr << "warning: m=" << m << " clipped to n-1=" << n - 1 << "\n";
      m = n - 1;
    }
  }
  std::vector<ConditioningStrategy> strategies;
  for (const auto& s : strategy_names) {
    if (s == "scaled-nn") strategies.push_back(ConditioningStrategy::scaled_nn);
    else if (s == "unscaled-nn") strategies.push_back(ConditioningStrategy::unscaled_nn);
    else if (s == "fic") strategies.push_back(ConditioningStrategy::fic);
    else throw std::runtime_error("unknown strategy: " + s);
  }

  const auto rows = benchmark_kl(spec, m_list, strategies, reps, seed);
  write_kl_csv(rows, out);
  std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaled-Vecchia GP regression with penalized variable selection"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Cap internal parallelism (default: all cores)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a simulated dataset CSV plus a truth JSON");
  int sim_n = 2000, sim_d = 100;
  std::string sim_mode = "indep";
  double sim_rho = 0.9;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "sim";
  sim->add_option("--n", sim_n, "Number of observations")->check(CLI::PositiveNumber);
  sim->add_option("--d", sim_d, "Number of covariates")->check(CLI::PositiveNumber);
  sim->add_option("--mode", sim_mode, "Covariate mode: indep | dep")
      ->check(CLI::IsMember({"indep", "dep"}));
  sim->add_option("--rho", sim_rho, "Constant correlation for dep mode");
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--out", sim_out, "Output prefix");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the regularization path and write model.json");
  std::string fit_data, fit_response = "y", fit_out = ".";
  FitConfig cfg;
  int fit_kappa = -1;
  fit->add_option("--data", fit_data, "Training CSV")->required();
  fit->add_option("--response", fit_response, "Response column name");
  fit->add_option("--m", cfg.m, "Max conditioning-set size")->check(CLI::PositiveNumber);
  fit->add_option("--k", cfg.k, "Covariates screened per forward step")->check(CLI::PositiveNumber);
  fit->add_option("--gamma", cfg.gamma, "Bridge exponent in (0,1]");
  fit->add_option("--kappa", fit_kappa, "Adaptive-penalty history length (default 0 full-batch, 2 mini-batch)");
  fit->add_option("--batch", cfg.batch, "Mini-batch size (0 = full batch)");
  fit->add_option("--seed", cfg.seed, "Random seed");
  fit->add_option("--max-iter", cfg.opt.max_iter, "QCCD iteration cap (default 100 full / 200 mini-batch)");
  fit->add_option("--out-dir", fit_out, "Output directory");

  // predict
  auto* prd = app.add_subcommand("predict", "Posterior predictions from a fitted model");
  std::string prd_model, prd_data, prd_out = "predictions.csv";
  int prd_m = 0;
  bool prd_latent = false;
  prd->add_option("--model", prd_model, "model.json from fit")->required();
  prd->add_option("--data", prd_data, "Test CSV")->required();
  prd->add_option("--m", prd_m, "Conditioning-set size (default: model config)");
  prd->add_flag("--latent", prd_latent, "Report latent-scale variance (noise subtracted)");
  prd->add_option("--out", prd_out, "Output CSV");

  // benchmark-kl
  auto* bkl = app.add_subcommand("benchmark-kl", "KL of implied vs exact joint per strategy and m");
  int bkl_n = 1000, bkl_d = 10, bkl_reps = 5;
  std::vector<int> bkl_m = {5, 10, 20, 40};
  std::vector<std::string> bkl_strategies = {"scaled-nn", "unscaled-nn", "fic"};
  std::uint64_t bkl_seed = 1;
  std::string bkl_out = "kl_benchmark.csv";
  bkl->add_option("--n", bkl_n, "Observations (dense oracle; <= 8192)")->check(CLI::PositiveNumber);
  bkl->add_option("--d", bkl_d, "Covariates")->check(CLI::PositiveNumber);
  bkl->add_option("--m-list", bkl_m, "Conditioning-set sizes");
  bkl->add_option("--strategies", bkl_strategies, "Subset of scaled-nn unscaled-nn fic");
  bkl->add_option("--reps", bkl_reps, "Replicates")->check(CLI::PositiveNumber);
  bkl->add_option("--seed", bkl_seed, "Random seed");
  bkl->add_option("--out", bkl_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*sim) return cmd_simulate(sim_n, sim_d, sim_mode, sim_rho, sim_seed, sim_out);
    if (*fit) {
      if (fit_kappa >= 0) cfg.kappa = fit_kappa;
      else cfg.kappa = cfg.batch > 0 ? 2 : 0;
      return cmd_fit(fit_data, fit_response, cfg, fit_out);
    }
    if (*prd) return cmd_predict(prd_model, prd_data, prd_m, prd_latent, prd_out);
    if (*bkl) return cmd_benchmark_kl(bkl_n, bkl_d, bkl_m, bkl_strategies, bkl_reps, bkl_seed, bkl_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
