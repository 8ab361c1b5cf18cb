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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vgpr/csv.hpp"
#include "vgpr/rng.hpp"

using namespace vgpr;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("csv round-trips doubles bit-exactly") {
  const std::string path = temp_path("vgpr_csv_rt.csv");
  Matrix values(3, 2);
  values << 1.0, -0.12345678901234567, 3.3333333333333335e-5, 2e300, -7.1, 0.0;
  csv::write(path, {"a", "b"}, values);
  const csv::Table t = csv::read(path);
  REQUIRE(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.values.rows() == 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) CHECK(t.values(r, c) == values(r, c));
  std::filesystem::remove(path);
}

TEST_CASE("csv parse errors name row and column") {
  const std::string path = temp_path("vgpr_csv_bad.csv");
  {
    std::ofstream out(path);
    out << "y,x1\n1.0,2.0\n3.0,\n";
  }
  CHECK_THROWS_WITH_AS(csv::read(path), doctest::Contains("row 3"), std::runtime_error);
  try {
    csv::read(path);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("x1") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("csv rejects missing file and missing header") {
  CHECK_THROWS_AS(csv::read("/nonexistent/file.csv"), std::runtime_error);
}

TEST_CASE("derived sub-stream seeds differ by name and index") {
  const std::uint64_t master = 42;
  CHECK(rng::derive(master, "a") != rng::derive(master, "b"));
  CHECK(rng::derive(master, "a", 0) != rng::derive(master, "a", 1));
  CHECK(rng::derive(master, "a") == rng::derive(master, "a"));
  CHECK(rng::derive(1, "a") != rng::derive(2, "a"));
}

TEST_CASE("uniform and normal draws look sane") {
  rng::Rng gen(123);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = gen.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = gen.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}

TEST_CASE("permutation and sampling are reproducible and valid") {
  rng::Rng a(7), b(7);
  CHECK(a.permutation(20) == b.permutation(20));
  const auto s = a.sample_without_replacement(10, 4);
  REQUIRE(s.size() == 4);
  CHECK(std::is_sorted(s.begin(), s.end()));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] != s[i - 1]);
}
