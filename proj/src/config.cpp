// SPDX-License-Identifier: MIT
#include "rismimo/config.hpp"

#include <cmath>
#include <sstream>

namespace rismimo {

namespace {

bool bad_rician(const Rician& r) {
  return !r.infinite && (std::isnan(r.value) || std::isinf(r.value) || r.value < 0.0);
}

} // namespace

std::vector<std::string> SystemConfig::violations() const {
  std::vector<std::string> v;
  if (M <= 0) v.push_back("M must be positive");
  if (N <= 0) v.push_back("N must be positive");
  if (K <= 0) v.push_back("K must be positive");
  if (N > 0 && !is_perfect_square(N))
    v.push_back("N must be a perfect square for the planar RIS response");
  if (tau < K) v.push_back("tau >= K violated: pilot length shorter than the user count");
  if (tau_c <= tau) v.push_back("tau_c > tau violated: no symbols left for data");
  if (!(p > 0.0)) v.push_back("p must be positive");
  if (!(sigma2 >= 0.0)) v.push_back("sigma2 must be nonnegative");
  if (!(sigma_e2 >= 0.0)) v.push_back("sigma_e2 must be nonnegative");
  if (!(beta >= 0.0)) v.push_back("beta must be nonnegative");
  if (bad_rician(delta)) v.push_back("delta must be >= 0 or flagged infinite");
  if (int(epsilon.size()) != K) v.push_back("epsilon must have K entries");
  if (int(alpha.size()) != K) v.push_back("alpha must have K entries");
  if (int(gamma.size()) != K) v.push_back("gamma must have K entries");
  if (int(user_arrival.size()) != K) v.push_back("user_arrival must have K entries");
  for (std::size_t k = 0; k < epsilon.size(); ++k)
    if (bad_rician(epsilon[k])) v.push_back("epsilon[" + std::to_string(k) + "] must be >= 0 or flagged infinite");
  for (std::size_t k = 0; k < alpha.size(); ++k)
    if (!(alpha[k] >= 0.0 && std::isfinite(alpha[k])))
      v.push_back("alpha[" + std::to_string(k) + "] must be finite and nonnegative");
  for (std::size_t k = 0; k < gamma.size(); ++k)
    if (!(gamma[k] >= 0.0 && std::isfinite(gamma[k])))
      v.push_back("gamma[" + std::to_string(k) + "] must be finite and nonnegative");
  if (!(d_bs > 0.0)) v.push_back("d_bs must be positive");
  if (!(d_ris > 0.0)) v.push_back("d_ris must be positive");
  return v;
}

void SystemConfig::validate() const {
  auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& s : v) os << "\n  - " << s;
  Errc code = Errc::invalid_config;
  if (tau < K) code = Errc::pilot_shortage;
  throw Error(code, os.str());
}

UserWeights user_weights(const SystemConfig& cfg, int k) {
  const double ba = cfg.beta * cfg.alpha[k];
  const double pd = cfg.delta.los(), qd = cfg.delta.nlos();
  const double pe = cfg.epsilon[k].los(), qe = cfg.epsilon[k].nlos();
  return UserWeights{ba * pd * pe, ba * pd * qe, ba * qd * pe, ba * qd * qe, cfg.gamma[k]};
}

VectorXcd PhaseShifts::c() const {
  VectorXcd out(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) out[n] = std::polar(1.0, theta[n]);
  return out;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool is_perfect_square(int n) {
  if (n < 0) return false;
  int r = int(std::lround(std::sqrt(double(n))));
  return r * r == n;
}

int isqrt_exact(int n) {
  if (n <= 0 || !is_perfect_square(n))
    throw Error(Errc::invalid_dimension, "N=" + std::to_string(n) + " is not a positive perfect square");
  return int(std::lround(std::sqrt(double(n))));
}

} // namespace rismimo
