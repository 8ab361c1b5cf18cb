/*!
 * This file is part of the vgpr library for scaled-Vecchia Gaussian process
 * regression with penalized variable selection.
 *
 * Copyright (c) 2026 The vgpr authors. All rights reserved.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the project root for license information.
 */
#pragma once

#include <string>
#include <vector>

#include "vgpr/data.hpp"
#include "vgpr/selection.hpp"
#include "vgpr/types.hpp"

namespace vgpr {

/// Fitted model as persisted to model.json (schema_version 1). Covariate
/// indices are stored 1-based to match the x1..xd column naming.
struct ModelFile {
  int schema_version = 1;
  Hyperparameters theta;      // unselected squared relevances are 0
  std::vector<int> zeta;      // 0-based in memory
  double lambda = 0.0;
  double oos_rmse = 0.0;

  // Standardization applied to the training file before fitting.
  Vector col_means, col_sds;
  double y_mean = 0.0, y_sd = 1.0;
  std::vector<std::string> col_names;
  std::string response_name;
  std::string train_data_path;

  FitConfig config;
};

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace vgpr
