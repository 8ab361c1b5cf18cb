/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#include "vgpr/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vgpr {

namespace {

using nlohmann::json;

json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

std::string family_name(KernelFamily f) {
  return f == KernelFamily::matern25 ? "matern25" : "sqexp";
}

KernelFamily family_from_name(const std::string& s) {
  if (s == "matern25") return KernelFamily::matern25;
  if (s == "sqexp") return KernelFamily::sqexp;
  throw std::runtime_error("unknown kernel family: " + s);
}

}  // namespace

void save_model(const ModelFile& model, const std::string& path) {
  json j;
  j["schema_version"] = model.schema_version;
  j["kernel_family"] = family_name(model.theta.family);
  j["theta"] = {{"sigma2", model.theta.sigma2}, {"tau2", model.theta.tau2}, {"sr", to_json(model.theta.sr)}};
  json zeta = json::array();
  for (int l : model.zeta) zeta.push_back(l + 1);
  j["zeta"] = zeta;
  j["lambda"] = model.lambda;
  j["oos_rmse"] = model.oos_rmse;
  j["standardization"] = {{"col_means", to_json(model.col_means)},
                          {"col_sds", to_json(model.col_sds)},
                          {"y_mean", model.y_mean},
                          {"y_sd", model.y_sd}};
  j["columns"] = model.col_names;
  j["response"] = model.response_name;
  j["train_data_path"] = model.train_data_path;
  j["config"] = {{"m", model.config.m},         {"k", model.config.k},
                 {"gamma", model.config.gamma}, {"kappa", model.config.kappa},
                 {"batch", model.config.batch}, {"seed", model.config.seed}};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  in >> j;

  ModelFile m;
  m.schema_version = j.at("schema_version").get<int>();
  if (m.schema_version != 1)
    throw std::runtime_error("unsupported model schema_version: " + std::to_string(m.schema_version));
  m.theta.family = family_from_name(j.at("kernel_family").get<std::string>());
  m.theta.sigma2 = j.at("theta").at("sigma2").get<double>();
  m.theta.tau2 = j.at("theta").at("tau2").get<double>();
  m.theta.sr = vector_from_json(j.at("theta").at("sr"));
  for (const auto& l : j.at("zeta")) m.zeta.push_back(l.get<int>() - 1);
  m.lambda = j.at("lambda").get<double>();
  m.oos_rmse = j.at("oos_rmse").get<double>();
  m.col_means = vector_from_json(j.at("standardization").at("col_means"));
  m.col_sds = vector_from_json(j.at("standardization").at("col_sds"));
  m.y_mean = j.at("standardization").at("y_mean").get<double>();
  m.y_sd = j.at("standardization").at("y_sd").get<double>();
  m.col_names = j.at("columns").get<std::vector<std::string>>();
  m.response_name = j.at("response").get<std::string>();
  m.train_data_path = j.at("train_data_path").get<std::string>();
  m.config.m = j.at("config").at("m").get<int>();
  m.config.k = j.at("config").at("k").get<int>();
  m.config.gamma = j.at("config").at("gamma").get<double>();
  m.config.kappa = j.at("config").at("kappa").get<int>();
  m.config.batch = j.at("config").at("batch").get<int>();
  m.config.seed = j.at("config").at("seed").get<std::uint64_t>();
  return m;
}

}  // namespace vgpr
