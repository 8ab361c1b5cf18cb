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

#include "vgpr/types.hpp"

namespace vgpr::csv {

/// Numeric table: comma-separated, UTF-8, '.' decimal point, header required.
struct Table {
  std::vector<std::string> header;
  Matrix values;  // rows x header.size()
};

/// Parse errors name the offending 1-based row (header = row 1) and column.
Table read(const std::string& path);

/// Values are written with 17 significant digits so a read-back reproduces
/// the doubles bit-exactly.
void write(const std::string& path, const std::vector<std::string>& header, const Matrix& values);

std::string format_double(double x);

}  // namespace vgpr::csv
