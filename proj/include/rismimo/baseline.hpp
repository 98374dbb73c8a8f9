// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/channel.hpp"

namespace rismimo {

struct BaselineReport {
  double avg_rate_with_overhead = 0.0; // prelog 1 - (N+1)/tau_c, floored at 0
  double avg_rate_idealized = 0.0;     // prelog 1 - 1/tau_c
  double avg_snr = 0.0;
  int intervals = 0;
  int trials_per_interval = 0;
};

// Result of the alternating MRC / phase-alignment loop for one estimate.
struct AlternatingResult {
  VectorXcd v;                  // unit-modulus RIS coefficients
  VectorXcd w;                  // MRC combiner
  std::vector<double> objective; // |w^H (G v + d)|^2 / ||w||^2 after every half-step
  int iterations = 0;
};

// Maximizes the desired-signal power |w^H (G v + d)|^2 over w (MRC) and v
// (phase alignment with w^H d). Stops on relative improvement below tol.
AlternatingResult alternating_design(const MatrixXcd& G, const VectorXcd& d, double tol = 1e-6,
                                     int max_iter = 100);

double overhead_prelog(int N, int tau_c);
double idealized_prelog(int tau_c);

// Single-user instantaneous-CSI scheme. Each interval draws one channel
// realization; each of its trials draws fresh pilot noise for the
// per-entry LMMSE estimates of G = H_2 diag(h) and d.
BaselineReport instantaneous_scheme(const SystemConfig& cfg, int intervals, int trials_per_interval,
                                    std::uint64_t seed);

} // namespace rismimo
