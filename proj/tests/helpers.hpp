// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/baseline.hpp"
#include "rismimo/expcli.hpp"
#include "rismimo/montecarlo.hpp"
#include "rismimo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace rismimo::testing {

inline constexpr double kPi = std::numbers::pi;

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline SystemConfig desk(int M, int N, int K) {
  SystemConfig c = with_users(table_defaults(), K);
  c.M = M;
  c.N = N;
  return c;
}

// Correlated model at EMI strength rho (dB) above the thermal noise.
inline SystemConfig desk_correlated(int M, int N, int K, double d_ris, double rho_db) {
  SystemConfig c = desk(M, N, K);
  c.correlated = true;
  c.d_ris = d_ris;
  c.sigma_e2 = c.sigma2 * db_to_linear(rho_db);
  for (auto& e : c.epsilon) e = Rician::inf();
  return c;
}

// Randomized small scenario; every draw is valid.
inline SystemConfig random_config(std::uint64_t seed, bool correlated, int M = 8, int N = 9, int K = 3) {
  Stream s(seed, 0, Block::moments);
  SystemConfig c;
  c.M = M;
  c.N = N;
  c.K = K;
  c.tau = K + int(s.uniform() * 4);
  c.tau_c = 196;
  c.p = dbm_to_watt(15.0 + 20.0 * s.uniform());
  c.sigma2 = dbm_to_watt(-104.0);
  c.delta = Rician{0.2 + 5.0 * s.uniform(), false};
  const Pathloss pl = scenario_geometry(5.0 + 40.0 * s.uniform(), 300.0 + 500.0 * s.uniform(), K);
  c.alpha = pl.alpha;
  c.gamma = pl.gamma;
  c.beta = pl.beta;
  c.d_bs = 0.5;
  c.d_ris = correlated ? 0.15 + 0.35 * s.uniform() : 0.5;
  c.ris_departure = {2.0 * kPi * s.uniform(), kPi * s.uniform()};
  c.bs_arrival = {2.0 * kPi * s.uniform(), kPi * s.uniform()};
  for (int k = 0; k < K; ++k) {
    c.user_arrival.push_back({2.0 * kPi * s.uniform(), kPi * s.uniform()});
    c.epsilon.push_back(correlated ? Rician::inf() : Rician{0.2 + 10.0 * s.uniform(), false});
  }
  c.correlated = correlated;
  c.sigma_e2 = correlated ? c.sigma2 * db_to_linear(10.0 + 30.0 * s.uniform()) : 0.0;
  return c;
}

// Central differences of a scalar function of theta.
inline VectorXd central_diff(const std::function<double(const VectorXd&)>& f, const VectorXd& theta,
                             double h = 1e-5) {
  VectorXd g(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) {
    VectorXd a = theta, b = theta;
    a[n] += h;
    b[n] -= h;
    g[n] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline MatrixXcd random_hermitian(int n, std::uint64_t seed) {
  Stream s(seed, 1, Block::moments);
  MatrixXcd X(n, n);
  s.fill_cn(X);
  return (X + X.adjoint()) / 2.0;
}

} // namespace rismimo::testing
