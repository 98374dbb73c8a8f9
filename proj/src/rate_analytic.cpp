// SPDX-License-Identifier: MIT
#include "rismimo/rate_analytic.hpp"

#include "rismimo/correlated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rismimo {

namespace {

struct IndepUser {
  UserWeights w;
  LmmseUser e;
  cd f;
  double x = 0; // |f|^2
};

std::vector<IndepUser> prepare(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                               const RateOptions& opts, double& s) {
  if (cfg.correlated) throw Error(Errc::wrong_model, "independent engine called with the correlated model");
  if (phase.size() != cfg.N) throw Error(Errc::invalid_dimension, "phase vector length must equal N");
  s = opts.perfect_csi ? 0.0 : cfg.pilot_noise();
  std::vector<IndepUser> users(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    auto& u = users[k];
    u.w = user_weights(cfg, k);
    if (opts.perfect_csi) {
      u.e.e1 = u.e.e2 = u.e.e3 = 1.0;
    } else {
      lmmse_scalars(cfg.M, cfg.N, u.w, s, u.e);
    }
    u.f = f_k(los, phase, k);
    u.x = std::norm(u.f);
  }
  return users;
}

double noise_term(int M, int N, const UserWeights& w, const LmmseUser& e, double x) {
  return M * (x * w.ll + N * w.ln * e.e2 + (N * (w.nl + w.nn) + w.gamma) * e.e1);
}

double leak_coeff_x(int M, int N, const UserWeights& w, const LmmseUser& e, double s) {
  const double L = w.ll, D = w.ln, C = w.nn, EC = w.nl + w.nn, g = w.gamma;
  const double e1 = e.e1, e2 = e.e2;
  return M * (N * (M * L * D + L * EC) * (e2 * e2 + 1.0) + 2.0 * L * C * (M * e1 + e2) * (e2 + 1.0)) +
         M * L * (g + (g + s) * e2 * e2);
}

double leak_term(int M, int N, const UserWeights& w, const LmmseUser& e, double x, double s) {
  const double D = w.ln, E = w.nl, C = w.nn, EC = w.nl + w.nn, g = w.gamma;
  const double e1 = e.e1, e2 = e.e2, e3 = e.e3;
  const double MM = double(M) * M, NN = double(N) * N;
  double r = x * leak_coeff_x(M, N, w, e, s);
  r += MM * NN * D * D * e2 * e2;
  r += M * NN * (2.0 * D * EC * e2 * e2 + EC * EC * e3);
  r += MM * N * (C * (2.0 * E + C) * e1 * e1 + 2.0 * C * D * e1 * e2);
  r += double(M) * N * (2.0 * C * D * e2 * e2 + C * (2.0 * E + C) * e3 + (2.0 * g + s) * (D * e2 * e2 + EC * e3));
  r += M * g * (g + s) * e3;
  return r;
}

struct InterferenceCoeffs {
  double s5, s6, s7;
  cd s8;
  double constant;
};

// I_ki = s5 x_k x_i + s6 x_k + s7 x_i + 2 Re{s8 conj(f_k) f_i} + constant.
InterferenceCoeffs interference_coeffs(int M, int N, const IndepUser& uk, const IndepUser& ui, cd hk_dot_hi,
                                       double s) {
  const auto& wk = uk.w;
  const auto& wi = ui.w;
  const double e1 = uk.e.e1, e2 = uk.e.e2, e3 = uk.e.e3;
  const double MM = double(M) * M, NN = double(N) * N;
  const double Dk = wk.ln, Ek = wk.nl, Ck = wk.nn, ECk = wk.nl + wk.nn, gk = wk.gamma;
  const double Di = wi.ln, Ei = wi.nl, Ci = wi.nn, ECi = wi.nl + wi.nn, gi = wi.gamma;
  InterferenceCoeffs c{};
  c.s5 = MM * wk.ll * wi.ll;
  c.s6 = M * wk.ll * (M * N * Di + N * ECi + 2.0 * M * e1 * Ci + gi);
  c.s7 = M * wi.ll * (M * N * Dk * e2 * e2 + N * ECk * e2 * e2 + 2.0 * M * e1 * e2 * Ck + (gk + s) * e2 * e2);
  // hbar_i^H hbar_k = conj(hbar_k^H hbar_i)
  c.s8 = MM * e1 * wk.ll * wi.nl * std::conj(hk_dot_hi);
  double r = MM * NN * Dk * Di * e2 * e2;
  r += M * NN * ((Di * ECk + Dk * ECi) * e2 * e2 + ECk * ECi * e3);
  r += MM * N * e1 * ((Ek * Ci + Ck * Ei + Ck * Ci) * e1 + 2.0 * Dk * Ci * e2);
  r += MM * e1 * Ek * Ei * std::norm(hk_dot_hi) * e1;
  r += double(M) * N * ((gk + s) * (Di * e2 * e2 + ECi * e3) + gi * (Dk * e2 * e2 + ECk * e3));
  r += M * gi * (gk + s) * e3;
  c.constant = r;
  return c;
}

double interference_value(const InterferenceCoeffs& c, const IndepUser& uk, const IndepUser& ui) {
  return c.s5 * uk.x * ui.x + c.s6 * uk.x + c.s7 * ui.x + 2.0 * (c.s8 * std::conj(uk.f) * ui.f).real() +
         c.constant;
}

double safe_sinr(double num, double den) { return (num > 0.0 && den > 0.0) ? num / den : 0.0; }

void finish(const SystemConfig& cfg, UserRate& r, double prelog) {
  double isum = 0.0;
  for (double v : r.I) isum += v;
  const double den = cfg.p * r.E_leak + cfg.p * isum + cfg.sigma_e2 * r.E_emi + cfg.sigma2 * r.E_noise;
  r.sinr = safe_sinr(cfg.p * r.E_signal, den);
  r.rate = prelog * std::log2(1.0 + r.sinr);
}

double rate_from_sinr(double prelog, double sinr) { return prelog * std::log2(1.0 + sinr); }

} // namespace

VectorXd RateBreakdown::rates() const {
  VectorXd r(users.size());
  for (std::size_t k = 0; k < users.size(); ++k) r[Eigen::Index(k)] = users[k].rate;
  return r;
}

VectorXd RateBreakdown::sinrs() const {
  VectorXd r(users.size());
  for (std::size_t k = 0; k < users.size(); ++k) r[Eigen::Index(k)] = users[k].sinr;
  return r;
}

double RateBreakdown::min_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& u : users) m = std::min(m, u.rate);
  return m;
}

cd f_k(const LosGeometry& los, const PhaseShifts& phase, int k) {
  return los.a_N.dot(phase.c().cwiseProduct(los.hbar[k]));
}

VectorXd zeta(const SystemConfig& cfg, int k) {
  const int side = isqrt_exact(cfg.N);
  const auto& t = cfg.ris_departure;
  const auto& u = cfg.user_arrival[k];
  const double row = std::sin(u.elevation) * std::sin(u.azimuth) - std::sin(t.elevation) * std::sin(t.azimuth);
  const double col = std::cos(u.elevation) - std::cos(t.elevation);
  VectorXd z(cfg.N);
  for (int n = 0; n < cfg.N; ++n)
    z[n] = 2.0 * std::numbers::pi * cfg.d_ris * ((n / side) * row + (n % side) * col);
  return z;
}

cd f_k_phase_sum(const SystemConfig& cfg, const PhaseShifts& phase, int k) {
  const VectorXd z = zeta(cfg, k);
  cd acc = 0.0;
  for (int n = 0; n < cfg.N; ++n) acc += std::polar(1.0, z[n] + phase.theta[n]);
  return acc;
}

RateBreakdown rate_independent(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                               const RateOptions& opts) {
  double s = 0.0;
  const auto users = prepare(cfg, los, phase, opts, s);
  RateBreakdown out;
  out.prelog = cfg.prelog();
  out.users.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    auto& r = out.users[k];
    const auto& u = users[k];
    r.E_noise = noise_term(cfg.M, cfg.N, u.w, u.e, u.x);
    r.E_signal = r.E_noise * r.E_noise;
    r.E_leak = leak_term(cfg.M, cfg.N, u.w, u.e, u.x, s);
    r.I.assign(cfg.K, 0.0);
    for (int i = 0; i < cfg.K; ++i) {
      if (i == k) continue;
      const auto c = interference_coeffs(cfg.M, cfg.N, u, users[i], los.hbar[k].dot(los.hbar[i]), s);
      r.I[i] = interference_value(c, u, users[i]);
    }
    finish(cfg, r, out.prelog);
  }
  return out;
}

RateBreakdown rate_rayleigh_risbs(const SystemConfig& cfg, const LosGeometry& los, const RateOptions& opts) {
  if (!cfg.delta.is_zero()) throw Error(Errc::wrong_regime, "Rayleigh RIS-BS engine requires delta = 0");
  if (cfg.correlated) throw Error(Errc::wrong_model, "Rayleigh RIS-BS engine serves the independent model");
  const double s = opts.perfect_csi ? 0.0 : cfg.pilot_noise();
  const int M = cfg.M, N = cfg.N;
  RateBreakdown out;
  out.prelog = cfg.prelog();
  out.users.resize(cfg.K);
  std::vector<UserWeights> w(cfg.K);
  for (int k = 0; k < cfg.K; ++k) w[k] = user_weights(cfg, k);
  for (int k = 0; k < cfg.K; ++k) {
    const double Ek = w[k].nl, Ck = w[k].nn, ECk = Ek + Ck, gk = w[k].gamma;
    const double agg = N * ECk + gk;
    const double e1 = opts.perfect_csi ? 1.0 : (agg + s > 0.0 ? agg / (agg + s) : 0.0);
    // The simplified forms carry a common factor 1/(M e1) relative to the general ones.
    const double scale = M * e1;
    auto& r = out.users[k];
    r.E_noise = scale * agg;
    r.E_signal = r.E_noise * r.E_noise;
    double leak = double(N) * N * ECk * ECk * e1 + double(M) * N * Ck * (2.0 * Ek + Ck) * e1 +
                  N * (Ck * (2.0 * Ek + Ck) + (2.0 * gk + s) * ECk) * e1 + gk * (gk + s) * e1;
    r.E_leak = scale * leak;
    r.I.assign(cfg.K, 0.0);
    for (int i = 0; i < cfg.K; ++i) {
      if (i == k) continue;
      const double Ei = w[i].nl, Ci = w[i].nn, ECi = Ei + Ci, gi = w[i].gamma;
      const double hh = std::norm(los.hbar[k].dot(los.hbar[i]));
      double v = double(N) * N * ECk * ECi * e1 + double(M) * N * (Ek * Ci + Ck * Ei + Ck * Ci) * e1 +
                 M * Ek * Ei * hh * e1 + N * ((gk + s) * ECi + gi * ECk) * e1 + gi * (gk + s) * e1;
      r.I[i] = scale * v;
    }
    finish(cfg, r, out.prelog);
  }
  return out;
}

RateBreakdown evaluate_rate(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase) {
  return cfg.correlated ? rate_correlated(cfg, los, phase) : rate_independent(cfg, los, phase);
}

SingleUserSnr single_user_snr_coeffs(const SystemConfig& cfg, const LosGeometry& los) {
  if (cfg.K != 1) throw Error(Errc::wrong_regime, "single-user SNR needs K = 1");
  if (cfg.N <= 1) throw Error(Errc::wrong_regime, "single-user SNR needs N > 1");
  if (cfg.delta.is_zero() || cfg.epsilon[0].is_zero())
    throw Error(Errc::wrong_regime, "single-user SNR needs delta > 0 and epsilon > 0");
  if (cfg.correlated) throw Error(Errc::wrong_model, "single-user SNR serves the independent model");
  (void)los;
  IndepUser u;
  u.w = user_weights(cfg, 0);
  const double s = cfg.pilot_noise();
  lmmse_scalars(cfg.M, cfg.N, u.w, s, u.e);
  auto num = [&](double x) { return std::sqrt(cfg.p) * noise_term(cfg.M, cfg.N, u.w, u.e, x); };
  auto den = [&](double x) {
    return cfg.p * leak_term(cfg.M, cfg.N, u.w, u.e, x, s) + cfg.sigma2 * noise_term(cfg.M, cfg.N, u.w, u.e, x);
  };
  SingleUserSnr r;
  r.s2 = num(0.0);
  r.s1 = num(1.0) - r.s2;
  r.t2 = den(0.0);
  r.t1 = den(1.0) - r.t2;
  return r;
}

const char* scaling_law_name(ScalingLaw law) {
  switch (law) {
    case ScalingLaw::rician_over_M: return "rician-M";
    case ScalingLaw::rayleigh_over_sqrtM: return "rayleigh-sqrtM";
    case ScalingLaw::rayleigh_over_N: return "rayleigh-N";
    case ScalingLaw::rician_rayleigh_over_N: return "rician-rayleigh-N";
    case ScalingLaw::single_over_MN2: return "single-MN2";
    case ScalingLaw::single_over_N2: return "single-N2";
    case ScalingLaw::single_rayleigh_over_N: return "single-rayleigh-N";
  }
  return "?";
}

ScalingLaw parse_scaling_law(const std::string& name) {
  for (auto law : {ScalingLaw::rician_over_M, ScalingLaw::rayleigh_over_sqrtM, ScalingLaw::rayleigh_over_N,
                   ScalingLaw::rician_rayleigh_over_N, ScalingLaw::single_over_MN2, ScalingLaw::single_over_N2,
                   ScalingLaw::single_rayleigh_over_N})
    if (name == scaling_law_name(law)) return law;
  throw Error(Errc::invalid_config, "unknown scaling law: " + name);
}

double scaled_power(ScalingLaw law, double E_u, int M, int N) {
  switch (law) {
    case ScalingLaw::rician_over_M: return E_u / M;
    case ScalingLaw::rayleigh_over_sqrtM: return E_u / std::sqrt(double(M));
    case ScalingLaw::rayleigh_over_N:
    case ScalingLaw::rician_rayleigh_over_N:
    case ScalingLaw::single_rayleigh_over_N: return E_u / N;
    case ScalingLaw::single_over_MN2: return E_u / (double(M) * N * N);
    case ScalingLaw::single_over_N2: return E_u / (double(N) * N);
  }
  return E_u;
}

AsymptoticLimit asymptotic_limit(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                                 ScalingLaw law, double E_u) {
  if (!(E_u > 0.0)) throw Error(Errc::invalid_config, "E_u must be positive");
  const int M = cfg.M, N = cfg.N, K = cfg.K;
  const double sig2 = cfg.sigma2, tau = cfg.tau;
  const double sp = sig2 / (tau * E_u);
  std::vector<UserWeights> w(K);
  for (int k = 0; k < K; ++k) w[k] = user_weights(cfg, k);
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(Errc::wrong_regime, msg);
  };
  const bool single = (law == ScalingLaw::single_over_MN2 || law == ScalingLaw::single_over_N2 ||
                       law == ScalingLaw::single_rayleigh_over_N);
  if (single) require(K == 1, "single-user scaling law needs K = 1");

  AsymptoticLimit out;
  out.sinr.assign(K, 0.0);
  switch (law) {
    case ScalingLaw::rician_over_M: {
      require(!cfg.delta.is_zero(), "1/M law needs delta > 0");
      std::vector<double> x(K), e2(K);
      for (int k = 0; k < K; ++k) {
        x[k] = std::norm(f_k(los, phase, k));
        const double nd = N * w[k].ln;
        e2[k] = nd > 0.0 ? nd / (sp + nd) : 0.0;
      }
      for (int k = 0; k < K; ++k) {
        const double L = w[k].ll, D = w[k].ln, e = e2[k];
        const double sig = x[k] * L + N * D * e;
        const double leak = N * x[k] * L * D * (e * e + 1.0) + sp * x[k] * L * e * e +
                            double(N) * N * D * D * e * e + sp * N * D * e * e;
        double isum = 0.0;
        for (int i = 0; i < K; ++i) {
          if (i == k) continue;
          const double Li = w[i].ll, Di = w[i].ln;
          isum += x[k] * x[i] * L * Li + N * x[k] * L * Di + x[i] * Li * e * e * (N * D + sp) +
                  double(N) * N * D * Di * e * e + N * sp * Di * e * e;
        }
        out.sinr[k] = safe_sinr(E_u * sig * sig, E_u * leak + E_u * isum + sig2 * sig);
      }
      break;
    }
    case ScalingLaw::rayleigh_over_sqrtM: {
      require(cfg.delta.is_zero(), "1/sqrt(M) law needs delta = 0");
      const double E2 = tau * E_u * E_u;
      for (int k = 0; k < K; ++k) {
        const double Ek = w[k].nl, Ck = w[k].nn;
        const double agg = N * (Ek + Ck) + w[k].gamma;
        double den = E2 * N * Ck * (2.0 * Ek + Ck) + sig2 * sig2;
        for (int i = 0; i < K; ++i) {
          if (i == k) continue;
          const double Ei = w[i].nl, Ci = w[i].nn;
          const double hh = std::norm(los.hbar[k].dot(los.hbar[i]));
          den += E2 * (N * (Ek * Ci + Ck * Ei + Ck * Ci) + Ek * Ei * hh);
        }
        out.sinr[k] = safe_sinr(E2 * agg * agg, den);
      }
      break;
    }
    case ScalingLaw::rayleigh_over_N:
    case ScalingLaw::single_rayleigh_over_N: {
      require(cfg.delta.is_zero(), "1/N law with Rayleigh RIS-BS needs delta = 0");
      for (int k = 0; k < K; ++k) {
        const double bak = cfg.beta * cfg.alpha[k];
        double den = sig2 * (1.0 + sig2 / (tau * E_u * bak));
        for (int i = 0; i < K; ++i) den += E_u * cfg.beta * cfg.alpha[i] + (cfg.alpha[i] / cfg.alpha[k]) * sig2 / tau;
        out.sinr[k] = safe_sinr(E_u * M * bak, den);
      }
      break;
    }
    case ScalingLaw::rician_rayleigh_over_N: {
      require(!cfg.delta.is_zero(), "1/N law with Rayleigh user links needs delta > 0");
      for (const auto& e : cfg.epsilon) require(e.is_zero(), "1/N law with Rayleigh user links needs epsilon = 0");
      for (int k = 0; k < K; ++k) {
        const double D = w[k].ln, C = w[k].nn;
        const double d1 = C + sp, d2 = C + sp + M * D;
        const double a3 = (d1 > 0 && d2 > 0) ? D * sp / (d1 * d2) : 0.0;
        const double a4 = d1 > 0 ? C / d1 : 0.0;
        const double e1 = a3 + a4, e2 = M * a3 + a4, e3 = M * a3 * a3 + 2.0 * a3 * a4 + a4 * a4;
        const double sig = D * e2 + C * e1;
        double isum = 0.0;
        for (int i = 0; i < K; ++i) {
          const double Di = w[i].ln, Ci = w[i].nn;
          isum += M * Di * D * e2 * e2 + 2.0 * Di * C * e2 * e2 + Ci * C * e3 + sp * (Di * e2 * e2 + Ci * e3);
        }
        out.sinr[k] = safe_sinr(E_u * M * sig * sig, E_u * isum + sig2 * sig);
      }
      break;
    }
    case ScalingLaw::single_over_MN2:
      out.sinr[0] = E_u / sig2 * w[0].ll;
      break;
    case ScalingLaw::single_over_N2:
      out.sinr[0] = E_u / sig2 * M * w[0].ll;
      break;
  }
  out.rate.resize(K);
  for (int k = 0; k < K; ++k) out.rate[k] = rate_from_sinr(cfg.prelog(), out.sinr[k]);
  return out;
}

IndependentGradientCoefficients independent_gradient_coefficients(const SystemConfig& cfg, const LosGeometry& los,
                                                                  const PhaseShifts& phase,
                                                                  const RateOptions& opts) {
  double s = 0.0;
  const auto users = prepare(cfg, los, phase, opts, s);
  const int K = cfg.K;
  IndependentGradientCoefficients g;
  g.s_k11.resize(K);
  g.noise_coeff.resize(K);
  g.s5.assign(K, std::vector<double>(K, 0.0));
  g.s6 = g.s7 = g.s5;
  g.s8.assign(K, std::vector<cd>(K, 0.0));
  for (int k = 0; k < K; ++k) {
    g.s_k11[k] = leak_coeff_x(cfg.M, cfg.N, users[k].w, users[k].e, s);
    g.noise_coeff[k] = cfg.M * users[k].w.ll;
    for (int i = 0; i < K; ++i) {
      if (i == k) continue;
      const auto c = interference_coeffs(cfg.M, cfg.N, users[k], users[i], los.hbar[k].dot(los.hbar[i]), s);
      g.s5[k][i] = c.s5;
      g.s6[k][i] = c.s6;
      g.s7[k][i] = c.s7;
      g.s8[k][i] = c.s8;
    }
  }
  return g;
}

namespace {

// df/dtheta_n = j conj(a_n) c_n hbar_n.
VectorXcd grad_f(const LosGeometry& los, const VectorXcd& c, int k) {
  return cd(0.0, 1.0) * los.a_N.conjugate().cwiseProduct(c).cwiseProduct(los.hbar[k]);
}

} // namespace

VectorXd grad_f_abs2(const LosGeometry& los, const PhaseShifts& phase, int k) {
  const VectorXcd c = phase.c();
  const cd f = los.a_N.dot(c.cwiseProduct(los.hbar[k]));
  return 2.0 * (std::conj(f) * grad_f(los, c, k)).real();
}

std::vector<VectorXd> grad_sinr_independent(const SystemConfig& cfg, const LosGeometry& los,
                                            const PhaseShifts& phase, const RateOptions& opts) {
  const auto rb = rate_independent(cfg, los, phase, opts);
  const auto coef = independent_gradient_coefficients(cfg, los, phase, opts);
  const VectorXcd c = phase.c();
  const int K = cfg.K;
  std::vector<cd> f(K);
  std::vector<VectorXcd> df(K);
  std::vector<VectorXd> dx(K);
  for (int k = 0; k < K; ++k) {
    f[k] = los.a_N.dot(c.cwiseProduct(los.hbar[k]));
    df[k] = grad_f(los, c, k);
    dx[k] = 2.0 * (std::conj(f[k]) * df[k]).real();
  }
  std::vector<VectorXd> out(K);
  for (int k = 0; k < K; ++k) {
    const auto& r = rb.users[k];
    const double xk = std::norm(f[k]);
    const VectorXd d_noise = coef.noise_coeff[k] * dx[k];
    const VectorXd d_signal = 2.0 * r.E_noise * d_noise;
    const VectorXd d_leak = coef.s_k11[k] * dx[k];
    VectorXd d_interf = VectorXd::Zero(cfg.N);
    double isum = 0.0;
    for (int i = 0; i < K; ++i) {
      if (i == k) continue;
      isum += r.I[i];
      const double xi = std::norm(f[i]);
      // d(conj(f_k) f_i)
      const VectorXcd dX = df[k].conjugate() * f[i] + std::conj(f[k]) * df[i];
      d_interf += coef.s5[k][i] * (dx[k] * xi + xk * dx[i]) + coef.s6[k][i] * dx[k] + coef.s7[k][i] * dx[i] +
                  2.0 * (coef.s8[k][i] * dX).real();
    }
    const double den = cfg.p * r.E_leak + cfg.p * isum + cfg.sigma2 * r.E_noise;
    if (!(den > 0.0)) {
      out[k] = VectorXd::Zero(cfg.N);
      continue;
    }
    const VectorXd d_den = cfg.p * d_leak + cfg.p * d_interf + cfg.sigma2 * d_noise;
    out[k] = cfg.p * d_signal / den - cfg.p * r.E_signal * d_den / (den * den);
  }
  return out;
}

} // namespace rismimo
