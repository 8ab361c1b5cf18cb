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
#include <random>
#include <string_view>
#include <vector>

namespace vgpr::rng {

/// Derives the seed of a named sub-stream from a master seed, so that every
/// random component of a run is reproducible from one user-facing seed.
std::uint64_t derive(std::uint64_t master, std::string_view stream);
std::uint64_t derive(std::uint64_t master, std::string_view stream, std::uint64_t index);

/// mt19937_64 wrapper with hand-rolled real-valued draws. The distributions in
/// <random> are implementation-defined, which would make saved expected values
/// toolchain-dependent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (second value of each pair cached).
  double normal();

  /// Uniform integer in [0, bound).
  int uniform_int(int bound);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n);

  /// k distinct indices from 0..n-1, uniform without replacement, returned in
  /// ascending order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace vgpr::rng
