// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/channel.hpp"

namespace rismimo {

// tau x K matrix of orthonormal DFT columns.
MatrixXcd pilot_matrix(int tau, int K);

struct Observation {
  std::vector<VectorXcd> q; // true aggregated channels
  std::vector<VectorXcd> y; // despread pilot observations y_p^k
};

// Draws pilot noise (and pilot-phase EMI for the correlated model) for one
// trial and returns y_p^k = q_k + (H_{c,2} Phi V + N) s_k / sqrt(tau p).
Observation pilot_observation(const ChannelRealization& real, const SystemConfig& cfg,
                              const LosGeometry& los, const PhaseShifts& phase,
                              std::uint64_t seed, std::uint64_t trial = 0);

struct LmmseUser {
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
  double e1 = 0, e2 = 0, e3 = 0;
  MatrixXcd A;
  VectorXcd B;
  VectorXcd mean; // E{q_k}
};

struct LmmseModel {
  std::vector<LmmseUser> users;
  double s = 0; // sigma^2/(tau p)
};

LmmseModel lmmse_model(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase);

// a1 = N c delta and a2 = N c (eps+1) + gamma, written in path weights.
void lmmse_scalars(int M, int N, const UserWeights& w, double s, LmmseUser& u);

struct UpsilonUser {
  MatrixXcd Upsilon;
  double psi1 = 0;   // chat h^H Phi^H R Phi h + gamma
  double chat = 0;   // beta alpha / (delta + 1)
  double chat_los = 0; // chat * delta
  VectorXcd mean;    // sqrt(chat delta) Hbar2 Phi hbar
};

struct UpsilonModel {
  std::vector<UpsilonUser> users;
  double s = 0;
};

UpsilonModel upsilon_model(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase);

struct EstimateResult {
  std::vector<VectorXcd> q_hat;
  std::vector<VectorXcd> error;
  std::vector<VectorXcd> observation;
};

EstimateResult lmmse_estimate(const Observation& obs, const LmmseModel& model);
EstimateResult lmmse_estimate(const Observation& obs, const UpsilonModel& model);

struct MseReport {
  double trace_mse = 0;
  double nmse = 0;
};

std::vector<MseReport> mse_nmse(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase);

// Closed-form NMSE from a1, a2 and s = sigma^2/(tau p).
double nmse_closed_form(int M, double a1, double a2, double s);

} // namespace rismimo
