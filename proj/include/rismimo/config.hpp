// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rismimo {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class Errc {
  invalid_dimension,
  invalid_config,
  invalid_geometry,
  pilot_shortage,
  wrong_model,
  unsupported_model,
  wrong_regime,
  infeasible,
  insufficient_trials,
  degenerate,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Rician factor with an explicit infinity flag. Finite values split the
// channel power into a LoS share v/(v+1) and a scattered share 1/(v+1).
struct Rician {
  double value = 0.0;
  bool infinite = false;

  static Rician inf() { return Rician{0.0, true}; }
  double los() const { return infinite ? 1.0 : value / (value + 1.0); }
  double nlos() const { return infinite ? 0.0 : 1.0 / (value + 1.0); }
  bool is_zero() const { return !infinite && value == 0.0; }
};

struct Direction {
  double azimuth = 0.0;
  double elevation = 0.0;
};

struct SystemConfig {
  int M = 64;
  int N = 64;
  int K = 8;
  double p = 1.0;        // W
  double sigma2 = 0.0;   // W
  double sigma_e2 = 0.0; // W, EMI power at the RIS
  int tau = 8;
  int tau_c = 196;
  Rician delta{1.0, false};
  std::vector<Rician> epsilon;
  std::vector<double> alpha;
  std::vector<double> gamma;
  double beta = 0.0;
  double d_bs = 0.5;  // wavelengths
  double d_ris = 0.5; // wavelengths
  Direction ris_departure;          // a_N side of the RIS-BS LoS link
  Direction bs_arrival;             // a_M side of the RIS-BS LoS link
  std::vector<Direction> user_arrival; // per-user AoA at the RIS
  bool correlated = false;

  // Every violated constraint, in a stable order. Empty means valid.
  std::vector<std::string> violations() const;
  void validate() const;

  // sigma^2 / (tau p): effective pilot noise after despreading.
  double pilot_noise() const { return sigma2 / (double(tau) * p); }
  double prelog() const { return double(tau_c - tau) / double(tau_c); }
};

// Per-user path weights: beta*alpha_k split by the LoS/NLoS shares of the
// RIS-BS link (first letter) and the user-RIS link (second letter).
struct UserWeights {
  double ll = 0.0; // LoS-LoS
  double ln = 0.0; // LoS RIS-BS, scattered user-RIS
  double nl = 0.0; // scattered RIS-BS, LoS user-RIS
  double nn = 0.0; // scattered-scattered
  double gamma = 0.0;
};

UserWeights user_weights(const SystemConfig& cfg, int k);

struct PhaseShifts {
  VectorXd theta;

  PhaseShifts() = default;
  explicit PhaseShifts(VectorXd t) : theta(std::move(t)) {}
  static PhaseShifts zeros(int N) { return PhaseShifts(VectorXd::Zero(N)); }
  VectorXcd c() const;
  int size() const { return int(theta.size()); }
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double db_to_linear(double db);

bool is_perfect_square(int n);
int isqrt_exact(int n); // throws invalid_dimension when n is not a square

} // namespace rismimo
