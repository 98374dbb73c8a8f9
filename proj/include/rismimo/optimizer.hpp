// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/correlated.hpp"
#include "rismimo/trace_chain.hpp"

#include <string>

namespace rismimo {

struct OptimizerConfig {
  double mu = 100.0;     // surrogate sharpness
  double kappa_a = 1.0;  // initial step of every line search
  double kappa_b = 0.5;  // Armijo constant
  double shrink = 0.8;
  double conv_tol = 1e-5;
  int max_outer = 500;
  int max_backtrack = 60;
  int restarts = 4;

  std::vector<std::string> violations() const;
  void validate() const;
};

// -(1/mu) ln sum_k exp(-mu R_k), evaluated with a max shift.
double logsumexp_objective(const VectorXd& rates, double mu);

// Softmax weights d f / d R_k of the surrogate.
VectorXd logsumexp_weights(const VectorXd& rates, double mu);

struct ObjectiveEval {
  double value = 0.0;
  VectorXd rates;
  VectorXd grad; // empty unless requested
};

// Surrogate objective for either rate engine, optionally with its gradient.
ObjectiveEval evaluate_objective(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                                 double mu, bool with_gradient);

VectorXd grad_objective(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase, double mu);

enum class StopReason { converged, max_outer, backtrack_exhausted };
const char* stop_reason_name(StopReason r);

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
};

struct AscentResult {
  PhaseShifts phase;
  double objective = 0.0;
  double min_rate = 0.0;
  std::vector<TraceRow> trace; // row 0 is the starting point
  StopReason stop = StopReason::converged;
  int restart = 0;
};

AscentResult gradient_ascent(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& theta0,
                             const OptimizerConfig& opt = {});

// theta uniform on [0, 2pi)^N, one independent draw per (seed, index).
PhaseShifts random_phases(int N, std::uint64_t seed, std::uint64_t index = 0);

// opt.restarts random starts; keeps the best surrogate value.
AscentResult optimize_phases(const SystemConfig& cfg, const LosGeometry& los, const OptimizerConfig& opt,
                             std::uint64_t seed);

struct SingleUserDesign {
  PhaseShifts phase;
  double x = 0.0;   // chosen |f|^2, either 0 or N^2
  int case_id = 0;  // 1..3 from the x0R position
  SingleUserSnr coeffs;
};

SingleUserDesign single_user_design(const SystemConfig& cfg, const LosGeometry& los);

// |f_k| = N
PhaseShifts align_phases(const SystemConfig& cfg, int k);
// |f_k| = 0, needs N >= 2
PhaseShifts cancel_phases(const SystemConfig& cfg, int k);

} // namespace rismimo
