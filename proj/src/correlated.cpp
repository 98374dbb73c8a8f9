// SPDX-License-Identifier: MIT
#include "rismimo/correlated.hpp"

#include "rismimo/trace_chain.hpp"

#include <cmath>

namespace rismimo {

namespace {

using F = ChainFactor;

void check_model(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase) {
  if (!cfg.correlated) throw Error(Errc::wrong_model, "correlated engine called with the independent model");
  if (!los.corr) throw Error(Errc::wrong_model, "correlation matrices missing from the geometry");
  for (const auto& e : cfg.epsilon)
    if (!e.infinite) throw Error(Errc::unsupported_model, "correlated model requires infinite epsilon");
  if (phase.size() != cfg.N) throw Error(Errc::invalid_dimension, "phase vector length must equal N");
}

struct UserState {
  double chat = 0, cl = 0, gam = 0;
  Dual f, f2, f6, t, f7;
  Dual psi1, trU, trU2, y;
  Dual f3, f5;
  Dual noise;
};

RateBreakdown correlated_impl(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                              bool with_grad, std::vector<VectorXd>* dsinr) {
  check_model(cfg, los, phase);
  const int M = cfg.M, N = cfg.N, K = cfg.K;
  const VectorXcd c = phase.c();
  const ChainEvaluator ev(c, with_grad);
  const MatrixXcd R = los.corr->R_ris.cast<cd>();
  const MatrixXcd Re = los.corr->R_emi.cast<cd>();
  const VectorXcd& aN = los.a_N;

  const double s = cfg.pilot_noise();
  const double bq = cfg.beta * cfg.delta.nlos();
  const double bp = cfg.beta * cfg.delta.los();
  const double g = cfg.sigma_e2 * bq / (cfg.tau * cfg.p);
  const double gd = cfg.sigma_e2 * bp / (cfg.tau * cfg.p);

  const Dual f1 = real(ev.trace_chain({F::mat(R), F::phi(), F::mat(Re), F::phi_h()}));
  const Dual f8m = real(ev.trace_chain(
      {F::mat(R), F::phi(), F::mat(Re), F::phi_h(), F::mat(R), F::phi(), F::mat(Re), F::phi_h()}));
  const Dual rho = real(ev.vector_chain(aN, {F::phi(), F::mat(Re), F::phi_h()}, aN));
  const Dual rho3 = real(ev.vector_chain(
      aN, {F::phi(), F::mat(Re), F::phi_h(), F::mat(R), F::phi(), F::mat(Re), F::phi_h()}, aN));
  const Dual w = gd * rho;

  std::vector<UserState> us(K);
  for (int k = 0; k < K; ++k) {
    auto& u = us[k];
    const auto& h = los.hbar[k];
    u.chat = cfg.alpha[k] * bq;
    u.cl = cfg.alpha[k] * bp;
    u.gam = cfg.gamma[k];
    u.f = ev.vector_chain(aN, {F::phi()}, h);
    u.f7 = abs2(u.f);
    u.f2 = real(ev.vector_chain(h, {F::phi_h(), F::mat(R), F::phi()}, h));
    u.f6 = real(ev.vector_chain(
        h, {F::phi_h(), F::mat(R), F::phi(), F::mat(Re), F::phi_h(), F::mat(R), F::phi()}, h));
    u.t = ev.vector_chain(aN, {F::phi(), F::mat(Re), F::phi_h(), F::mat(R), F::phi()}, h);

    // Upsilon_k = u1 I + u2 a_M a_M^H, from the rank-one EMI LoS block.
    u.psi1 = u.chat * u.f2 + u.gam;
    const Dual x = u.psi1 + s + g * f1;
    const Dual xw = x + double(M) * w;
    const Dual u1 = u.psi1 / x;
    const Dual u2 = -(u.psi1 * w) / (x * xw);
    u.y = double(M) * u.psi1 / xw;
    u.trU = double(M) * (u1 + u2);
    u.trU2 = double(M) * u1 * u1 + 2.0 * M * u1 * u2 + double(M) * M * u2 * u2;
    u.f3 = u.y * u.y / double(M) * rho;
    u.f5 = u.trU * u.trU;
    u.noise = double(M) * u.cl * u.f7 + u.chat * u.trU * u.f2 + u.gam * u.trU;
  }

  // m[k][i] = hbar_k^H Phi^H R Phi hbar_i
  std::vector<std::vector<Dual>> m(K, std::vector<Dual>(K));
  for (int k = 0; k < K; ++k) {
    m[k][k] = us[k].f2;
    for (int i = k + 1; i < K; ++i) {
      m[k][i] = ev.vector_chain(los.hbar[k], {F::phi_h(), F::mat(R), F::phi()}, los.hbar[i]);
      m[i][k] = conj(m[k][i]);
    }
  }

  RateBreakdown out;
  out.prelog = cfg.prelog();
  out.users.resize(K);
  CorrelatedRateTerms terms;
  terms.f1 = f1.re();
  terms.f8m = f8m.re();
  terms.users.resize(K);
  if (dsinr) dsinr->assign(K, VectorXd::Zero(N));

  const double MM = double(M) * M;
  for (int k = 0; k < K; ++k) {
    const auto& u = us[k];
    auto& ct = terms.users[k];
    const Dual y2 = u.y * u.y;
    const Dual f8kk = u.f7 * y2 / double(M);
    const Dual f9kk = u.f7 * y2 * rho;
    const Dual ft = real(conj(u.f) * u.t);

    std::array<Dual, 8> E;
    E[0] = MM * bp * u.cl * u.f7 * rho;
    E[1] = bp * (u.chat * u.f2 + 2.0 * g * f1 + u.gam + s) * u.f3;
    E[2] = bq * (double(M) * u.cl * u.f7 + (s + u.gam + u.chat * u.f2 + g * f1) * u.trU2) * f1;
    E[3] = bp * gd * y2 * rho * rho;
    E[4] = 2.0 * bq * u.cl * double(M) * u.trU * ft;
    E[5] = 2.0 * bq * gd * u.trU * u.y * rho3;
    E[6] = bq * u.chat * u.f5 * u.f6;
    E[7] = bq * g * u.f5 * f8m;

    std::array<Dual, 8> Lk;
    Lk[0] = double(M) * u.cl * u.gam * u.f7;
    Lk[1] = (double(M) * u.chat * u.cl * u.f7 + u.chat * u.cl * f8kk +
             (u.chat * u.chat * u.f2 + 2.0 * u.chat * u.gam + u.chat * s) * u.trU2) *
            u.f2;
    Lk[2] = (u.cl * u.gam + u.chat * gd * f1 + u.cl * s) * f8kk;
    Lk[3] = (u.gam * u.gam + u.gam * s + g * (u.gam + u.chat * u.f2) * f1) * u.trU2;
    Lk[4] = u.cl * gd * f9kk;
    Lk[5] = 2.0 * u.chat * gd * u.trU * u.y * ft;
    Lk[6] = gd * (u.gam + u.chat * u.f2) * u.f3;
    Lk[7] = u.chat * g * u.f5 * u.f6;

    Dual emi = 0.0, leak = 0.0, isum = 0.0;
    for (int o = 0; o < 8; ++o) {
      emi = emi + E[o];
      leak = leak + Lk[o];
      ct.emi[o] = E[o].re();
      ct.leak[o] = Lk[o].re();
    }

    ct.f8.assign(K, 0.0);
    ct.f9.assign(K, 0.0);
    ct.interference.assign(K, std::array<double, 8>{});
    auto& r = out.users[k];
    r.I.assign(K, 0.0);
    for (int i = 0; i < K; ++i) {
      const auto& v = us[i];
      const Dual f8ki = v.f7 * y2 / double(M);
      const Dual f9ki = v.f7 * y2 * rho;
      ct.f8[i] = f8ki.re();
      ct.f9[i] = f9ki.re();
      if (i == k) continue;
      std::array<Dual, 8> I;
      I[0] = v.gam * u.noise + MM * u.cl * v.cl * u.f7 * v.f7;
      I[1] = (double(M) * u.cl * v.chat * u.f7 + v.chat * (u.gam + s + g * f1) * u.trU2 + v.chat * gd * u.f3) * v.f2;
      I[2] = (u.cl * v.chat * f8ki + u.chat * v.chat * u.trU2 * v.f2) * u.f2;
      I[3] = (v.chat * gd * f1 + v.cl * (u.gam + s)) * f8ki;
      I[4] = (u.chat * v.chat * abs2(m[k][i]) + v.chat * g * v.f6) * u.f5;
      I[5] = 2.0 * u.cl * v.chat * u.trU * real(double(M) * conj(u.f) * v.f * m[i][k]);
      I[6] = v.cl * gd * f9ki;
      I[7] = 2.0 * v.chat * gd * u.trU * real(conj(v.t) * u.y * v.f);
      Dual Iki = 0.0;
      for (int o = 0; o < 8; ++o) {
        Iki = Iki + I[o];
        ct.interference[i][o] = I[o].re();
      }
      r.I[i] = Iki.re();
      isum = isum + Iki;
    }

    ct.f2 = u.f2.re();
    ct.f3 = u.f3.re();
    ct.f4 = u.trU2.re();
    ct.f5 = u.f5.re();
    ct.f6 = u.f6.re();
    ct.f7 = u.f7.re();
    ct.trace_upsilon = u.trU.re();

    const Dual signal = u.noise * u.noise;
    const Dual den = cfg.p * leak + cfg.p * isum + cfg.sigma_e2 * emi + cfg.sigma2 * u.noise;
    r.E_noise = u.noise.re();
    r.E_signal = signal.re();
    r.E_leak = leak.re();
    r.E_emi = emi.re();
    if (den.re() > 0.0 && signal.re() > 0.0) {
      const Dual sinr = cfg.p * signal / den;
      r.sinr = sinr.re();
      if (dsinr) (*dsinr)[k] = sinr.real_grad(N);
    } else {
      r.sinr = 0.0;
    }
    r.rate = out.prelog * std::log2(1.0 + r.sinr);
  }
  out.correlated = std::move(terms);
  return out;
}

} // namespace

RateBreakdown rate_correlated(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase) {
  return correlated_impl(cfg, los, phase, false, nullptr);
}

std::vector<VectorXd> grad_sinr_correlated(const SystemConfig& cfg, const LosGeometry& los,
                                           const PhaseShifts& phase, RateBreakdown* rate_out) {
  std::vector<VectorXd> d;
  RateBreakdown rb = correlated_impl(cfg, los, phase, true, &d);
  if (rate_out) *rate_out = std::move(rb);
  return d;
}

VectorXcd grad_trace_upsilon(const MatrixXcd& T, const SystemConfig& cfg, const LosGeometry& los,
                             const PhaseShifts& phase, int k) {
  check_model(cfg, los, phase);
  if (T.rows() != cfg.M || T.cols() != cfg.M) throw Error(Errc::invalid_dimension, "T must be M x M");
  const MatrixXcd R = los.corr->R_ris.cast<cd>();
  const MatrixXcd Re = los.corr->R_emi.cast<cd>();
  const VectorXcd c = phase.c();
  const double s = cfg.pilot_noise();
  const double bq = cfg.beta * cfg.delta.nlos();
  const double bp = cfg.beta * cfg.delta.los();
  const double g = cfg.sigma_e2 * bq / (cfg.tau * cfg.p);
  const double gd = cfg.sigma_e2 * bp / (cfg.tau * cfg.p);
  const double chat = cfg.alpha[k] * bq;

  const VectorXcd ph = c.cwiseProduct(los.hbar[k]);
  const double f2 = ph.dot(R * ph).real();
  const MatrixXcd PRP = c.asDiagonal() * Re * c.conjugate().asDiagonal();
  const double f1 = (R * PRP).trace().real();
  const double psi1 = chat * f2 + cfg.gamma[k];

  MatrixXcd X = gd * (los.Hbar2 * PRP * los.Hbar2.adjoint());
  X.diagonal().array() += psi1 + s + g * f1;
  const MatrixXcd U1 = X.ldlt().solve(MatrixXcd::Identity(cfg.M, cfg.M));
  const MatrixXcd TU1 = T * U1;
  const cd tr1 = TU1.trace();
  const cd tr2 = (TU1 * U1).trace();

  const MatrixXcd hh = los.hbar[k] * los.hbar[k].adjoint();
  const VectorXd f2p = grad_quadratic_form_hermitian(R, hh, phase.theta);
  const VectorXd f1p = grad_quadratic_form_hermitian(R, Re, phase.theta);
  const MatrixXcd A = los.Hbar2.adjoint() * U1 * T * U1 * los.Hbar2;
  const VectorXcd emi = grad_quadratic_form(A, Re, phase.theta);

  return chat * (tr1 - psi1 * tr2) * f2p.cast<cd>() - g * psi1 * tr2 * f1p.cast<cd>() - gd * psi1 * emi;
}

} // namespace rismimo
