// SPDX-License-Identifier: MIT
#include "rismimo/estimation.hpp"

#include <cmath>
#include <numbers>

namespace rismimo {

MatrixXcd pilot_matrix(int tau, int K) {
  if (tau < K) throw Error(Errc::pilot_shortage, "tau >= K violated: not enough orthogonal pilots");
  MatrixXcd S(tau, K);
  const double norm = 1.0 / std::sqrt(double(tau));
  for (int t = 0; t < tau; ++t)
    for (int k = 0; k < K; ++k)
      S(t, k) = norm * std::polar(1.0, -2.0 * std::numbers::pi * double(t) * double(k) / double(tau));
  return S;
}

Observation pilot_observation(const ChannelRealization& real, const SystemConfig& cfg,
                              const LosGeometry& los, const PhaseShifts& phase,
                              std::uint64_t seed, std::uint64_t trial) {
  const MatrixXcd S = pilot_matrix(cfg.tau, cfg.K);
  Observation obs;
  obs.q = aggregated_channel(real, cfg, los, phase);

  MatrixXcd noise(cfg.M, cfg.tau);
  Stream ns(seed, trial, Block::pilot_noise);
  ns.fill_cn(noise, cfg.sigma2);

  MatrixXcd disturbance = noise;
  if (cfg.correlated && cfg.sigma_e2 > 0.0) {
    MatrixXcd V(cfg.N, cfg.tau);
    Stream es(seed, trial, Block::pilot_emi);
    es.fill_cn(V, cfg.sigma_e2);
    V = (los.corr->sqrt_R * V).eval();
    const VectorXcd c = phase.c();
    const MatrixXcd H = ris_bs_channel(real, cfg, los);
    disturbance += H * (c.asDiagonal() * V);
  }

  const double scale = 1.0 / std::sqrt(double(cfg.tau) * cfg.p);
  obs.y.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) obs.y.push_back(obs.q[k] + scale * (disturbance * S.col(k)));
  return obs;
}

void lmmse_scalars(int M, int N, const UserWeights& w, double s, LmmseUser& u) {
  u.a1 = N * w.ln;
  u.a2 = N * (w.nl + w.nn) + w.gamma;
  const double d1 = u.a2 + s;
  const double d2 = u.a2 + s + M * u.a1;
  u.a3 = (d1 > 0 && d2 > 0) ? u.a1 * s / (d1 * d2) : 0.0;
  u.a4 = d1 > 0 ? u.a2 / d1 : 0.0;
  u.a5 = (d1 > 0 && d2 > 0) ? u.a1 * s * s / (d1 * d2) : 0.0;
  u.a6 = d1 > 0 ? u.a2 * s / d1 : 0.0;
  u.e1 = u.a3 + u.a4;
  u.e2 = M * u.a3 + u.a4;
  u.e3 = M * u.a3 * u.a3 + 2.0 * u.a3 * u.a4 + u.a4 * u.a4;
}

LmmseModel lmmse_model(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase) {
  if (cfg.correlated) throw Error(Errc::wrong_model, "lmmse_model serves the independent model");
  LmmseModel m;
  m.s = cfg.pilot_noise();
  const VectorXcd c = phase.c();
  const MatrixXcd I = MatrixXcd::Identity(cfg.M, cfg.M);
  for (int k = 0; k < cfg.K; ++k) {
    LmmseUser u;
    const UserWeights w = user_weights(cfg, k);
    lmmse_scalars(cfg.M, cfg.N, w, m.s, u);
    u.A = u.a3 * (los.a_M * los.a_M.adjoint()) + u.a4 * I;
    u.mean = std::sqrt(w.ll) * los.a_M * los.a_N.dot(c.cwiseProduct(los.hbar[k]));
    u.B = (I - u.A) * u.mean;
    m.users.push_back(std::move(u));
  }
  return m;
}

UpsilonModel upsilon_model(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase) {
  if (!cfg.correlated) throw Error(Errc::wrong_model, "upsilon_model serves the correlated model");
  for (const auto& e : cfg.epsilon)
    if (!e.infinite) throw Error(Errc::unsupported_model, "correlated model requires infinite epsilon");
  const auto& R = los.corr->R_ris;
  const auto& Re = los.corr->R_emi;
  const VectorXcd c = phase.c();
  const MatrixXcd PRP = c.asDiagonal() * Re.cast<cd>() * c.conjugate().asDiagonal();
  const double f1 = (R.cast<cd>() * PRP).trace().real();
  const double s = cfg.pilot_noise();
  const double g = cfg.sigma_e2 * cfg.beta * cfg.delta.nlos() / (cfg.tau * cfg.p);
  const double gd = cfg.sigma_e2 * cfg.beta * cfg.delta.los() / (cfg.tau * cfg.p);
  const MatrixXcd emi_los = gd * (los.Hbar2 * PRP * los.Hbar2.adjoint());

  UpsilonModel m;
  m.s = s;
  for (int k = 0; k < cfg.K; ++k) {
    UpsilonUser u;
    u.chat = cfg.alpha[k] * cfg.beta * cfg.delta.nlos();
    u.chat_los = cfg.alpha[k] * cfg.beta * cfg.delta.los();
    const VectorXcd ph = c.cwiseProduct(los.hbar[k]);
    const double f2 = ph.dot(R.cast<cd>() * ph).real();
    u.psi1 = u.chat * f2 + cfg.gamma[k];
    MatrixXcd X = emi_los;
    X.diagonal().array() += u.psi1 + s + g * f1;
    if (!(X.diagonal().real().minCoeff() > 0.0))
      throw Error(Errc::degenerate, "singular estimator matrix: all powers vanish");
    Eigen::LDLT<MatrixXcd> ldlt(X);
    MatrixXcd U = ldlt.solve(MatrixXcd::Identity(cfg.M, cfg.M)) * u.psi1;
    u.Upsilon = 0.5 * (U + U.adjoint());
    u.mean = std::sqrt(u.chat_los) * los.a_M * los.a_N.dot(ph);
    m.users.push_back(std::move(u));
  }
  return m;
}

EstimateResult lmmse_estimate(const Observation& obs, const LmmseModel& model) {
  EstimateResult r;
  for (std::size_t k = 0; k < obs.y.size(); ++k) {
    const auto& u = model.users[k];
    VectorXcd qh = u.A * obs.y[k] + u.B;
    r.error.push_back(obs.q[k] - qh);
    r.q_hat.push_back(std::move(qh));
    r.observation.push_back(obs.y[k]);
  }
  return r;
}

EstimateResult lmmse_estimate(const Observation& obs, const UpsilonModel& model) {
  EstimateResult r;
  for (std::size_t k = 0; k < obs.y.size(); ++k) {
    const auto& u = model.users[k];
    VectorXcd qh = u.mean + u.Upsilon * (obs.y[k] - u.mean);
    r.error.push_back(obs.q[k] - qh);
    r.q_hat.push_back(std::move(qh));
    r.observation.push_back(obs.y[k]);
  }
  return r;
}

double nmse_closed_form(int M, double a1, double a2, double s) {
  const double num = s * (M * a1 * a2 + a2 * a2 + (a1 + a2) * s);
  const double den = (a2 + s) * (a2 + s + M * a1) * (a1 + a2);
  return den > 0 ? num / den : 1.0;
}

std::vector<MseReport> mse_nmse(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase) {
  std::vector<MseReport> out;
  if (!cfg.correlated) {
    const double s = cfg.pilot_noise();
    for (int k = 0; k < cfg.K; ++k) {
      LmmseUser u;
      lmmse_scalars(cfg.M, cfg.N, user_weights(cfg, k), s, u);
      MseReport r;
      // Tr{(I - A) Cov} with Cov = a1 a a^H + a2 I and A = a3 a a^H + a4 I.
      r.trace_mse = cfg.M * ((1.0 - u.a4) * (u.a1 + u.a2) - u.a3 * (cfg.M * u.a1 + u.a2));
      r.nmse = nmse_closed_form(cfg.M, u.a1, u.a2, s);
      out.push_back(r);
    }
    (void)los;
    (void)phase;
    return out;
  }
  const UpsilonModel m = upsilon_model(cfg, los, phase);
  for (const auto& u : m.users) {
    MseReport r;
    const double tr = (MatrixXcd::Identity(cfg.M, cfg.M) - u.Upsilon).trace().real();
    r.trace_mse = u.psi1 * tr;
    r.nmse = tr / cfg.M;
    out.push_back(r);
  }
  return out;
}

} // namespace rismimo
