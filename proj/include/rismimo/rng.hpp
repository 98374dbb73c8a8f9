// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/config.hpp"

#include <random>

namespace rismimo {

// Independent draw families inside one trial.
enum class Block : std::uint64_t {
  ris_bs = 1,
  user_ris = 2,
  direct = 3,
  pilot_noise = 4,
  pilot_emi = 5,
  baseline_estimate = 6,
  init = 7,
  moments = 8,
};

// One generator per (seed, trial, block). Trials never share state, so any
// evaluation order reproduces the same numbers.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t trial, Block block);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  // CN(0, var)
  cd cn(double var = 1.0);
  void fill_cn(MatrixXcd& m, double var = 1.0);
  void fill_cn(VectorXcd& v, double var = 1.0);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace rismimo
