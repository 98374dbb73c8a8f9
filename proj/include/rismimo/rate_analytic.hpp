// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/estimation.hpp"

#include <array>

namespace rismimo {

// Per-user terms of the correlated closed form. Scalar names follow the
// notation block of the correlated rate: f1 is shared, f8/f9 are indexed by i.
struct CorrelatedUserTerms {
  double f2 = 0, f3 = 0, f4 = 0, f5 = 0, f6 = 0, f7 = 0;
  std::vector<double> f8, f9;
  double trace_upsilon = 0;
  std::array<double, 8> emi{};  // already scaled by beta/(delta+1)
  std::array<double, 8> leak{};
  std::vector<std::array<double, 8>> interference; // [i][omega], zero row at i == k
};

struct CorrelatedRateTerms {
  double f1 = 0;
  double f8m = 0; // Tr{(R_ris Phi R_emi Phi^H)^2}
  std::vector<CorrelatedUserTerms> users;
};

struct UserRate {
  double E_signal = 0;
  double E_leak = 0;
  double E_noise = 0;
  double E_emi = 0;
  std::vector<double> I; // length K, I[k] == 0
  double sinr = 0;
  double rate = 0;
};

struct RateBreakdown {
  double prelog = 0;
  std::vector<UserRate> users;
  std::optional<CorrelatedRateTerms> correlated;

  VectorXd rates() const;
  VectorXd sinrs() const;
  double min_rate() const;
};

struct RateOptions {
  bool perfect_csi = false; // e1 = e2 = e3 = 1 and sigma^2/(tau p) = 0
};

// f_k(Phi) = a_N^H Phi hbar_k.
cd f_k(const LosGeometry& los, const PhaseShifts& phase, int k);
// Phase offsets zeta_n^k evaluated from the angles, so that
// f_k = sum_n exp(j(zeta_n + theta_n)).
VectorXd zeta(const SystemConfig& cfg, int k);
cd f_k_phase_sum(const SystemConfig& cfg, const PhaseShifts& phase, int k);

RateBreakdown rate_independent(const SystemConfig& cfg, const LosGeometry& los,
                               const PhaseShifts& phase, const RateOptions& opts = {});

// delta = 0 specialization, evaluated from its own simplified expressions.
RateBreakdown rate_rayleigh_risbs(const SystemConfig& cfg, const LosGeometry& los,
                                  const RateOptions& opts = {});

// Dispatches on cfg.correlated.
RateBreakdown evaluate_rate(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase);

// Single-user SNR as a function of x = |f_k|^2: (s1 x + s2)^2 / (t1 x + t2).
struct SingleUserSnr {
  double s1 = 0, s2 = 0, t1 = 0, t2 = 0;
  double x0L() const { return -s2 / s1; }
  double x0R() const { return (s2 * t1 - 2.0 * s1 * t2) / (s1 * t1); }
  double snr(double x) const {
    const double num = s1 * x + s2;
    return num * num / (t1 * x + t2);
  }
};

SingleUserSnr single_user_snr_coeffs(const SystemConfig& cfg, const LosGeometry& los);

// Power scaling schedules with closed-form limits.
enum class ScalingLaw {
  rician_over_M,         // p = E_u/M, delta > 0
  rayleigh_over_sqrtM,   // p = E_u/sqrt(M), delta = 0
  rayleigh_over_N,       // p = E_u/N, delta = 0
  rician_rayleigh_over_N,// p = E_u/N, delta > 0, eps = 0
  single_over_MN2,       // p = E_u/(M N^2), K = 1, |f| = N
  single_over_N2,        // p = E_u/N^2, K = 1, |f| = N
  single_rayleigh_over_N // p = E_u/N, K = 1, delta = 0
};

const char* scaling_law_name(ScalingLaw law);
ScalingLaw parse_scaling_law(const std::string& name);

double scaled_power(ScalingLaw law, double E_u, int M, int N);

struct AsymptoticLimit {
  std::vector<double> sinr;
  std::vector<double> rate;
};

// phase is only read by rician_over_M (the limit keeps |f_k|).
AsymptoticLimit asymptotic_limit(const SystemConfig& cfg, const LosGeometry& los,
                                 const PhaseShifts& phase, ScalingLaw law, double E_u);

// Coefficients of the independent-model gradient. Index [k][i].
struct IndependentGradientCoefficients {
  std::vector<double> s_k11;
  std::vector<double> noise_coeff; // M * LoS-LoS weight
  std::vector<std::vector<double>> s5, s6, s7;
  std::vector<std::vector<cd>> s8; // s9 = conj(s8)
};

IndependentGradientCoefficients independent_gradient_coefficients(const SystemConfig& cfg,
                                                                  const LosGeometry& los,
                                                                  const PhaseShifts& phase,
                                                                  const RateOptions& opts = {});

// d|f_k|^2 / dtheta.
VectorXd grad_f_abs2(const LosGeometry& los, const PhaseShifts& phase, int k);

// dSINR_k/dtheta for every user.
std::vector<VectorXd> grad_sinr_independent(const SystemConfig& cfg, const LosGeometry& los,
                                            const PhaseShifts& phase, const RateOptions& opts = {});

} // namespace rismimo
