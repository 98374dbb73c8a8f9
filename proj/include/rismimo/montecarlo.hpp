// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/estimation.hpp"

#include <string>

namespace rismimo {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

// Sample-moment counterparts of the closed-form terms of one user.
struct McUserTerms {
  McEstimate signal;             // |E{qhat^H q}|^2
  McEstimate leak;               // E{|qhat^H q|^2} - |E{qhat^H q}|^2
  std::vector<McEstimate> I;     // E{|qhat_k^H q_i|^2}, I[k] unused
  McEstimate emi;                // E{qhat^H H Phi R_emi Phi^H H^H qhat}
  McEstimate noise;              // E{||qhat||^2}
};

struct McSinrReport {
  std::vector<McEstimate> sinr;
  std::vector<McUserTerms> terms;
};

struct McOptions {
  unsigned threads = 1; // results do not depend on this
};

constexpr std::size_t kMinMcTrials = 1000;

McSinrReport uatf_sinr_mc(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                          std::size_t trials, std::uint64_t seed, const McOptions& opts = {});

struct McRateReport {
  double prelog = 0.0;
  std::vector<double> rate;
  std::vector<double> std_error;
  std::vector<double> ci_low, ci_high; // 95% normal interval
  McSinrReport sinr;
};

McRateReport rate_mc_report(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                            std::size_t trials, std::uint64_t seed, const McOptions& opts = {});

struct MomentCheck {
  std::string name;
  double max_z = 0.0;     // largest |estimate - target| / stderr over real and imaginary entries
  double rel_error = 0.0; // Frobenius-relative error of the sample mean
  bool pass = false;
};

// Checks the Gaussian moment identities with dimensions cfg.M x cfg.N.
// Keep them small: the fourth-order identity costs O(M N^2) per trial.
std::vector<MomentCheck> moment_identity_suite(const SystemConfig& cfg, std::size_t trials, std::uint64_t seed);

// Order-stable pairwise sum.
double pairwise_sum(const double* x, std::size_t n);

} // namespace rismimo
