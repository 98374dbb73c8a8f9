// SPDX-License-Identifier: MIT
#include "rismimo/optimizer.hpp"

#include <cmath>
#include <numbers>

namespace rismimo {

namespace {

constexpr double kPi = std::numbers::pi;

PhaseShifts from_offsets(const VectorXd& zeta, const VectorXd& target) {
  return PhaseShifts(target - zeta);
}

} // namespace

std::vector<std::string> OptimizerConfig::violations() const {
  std::vector<std::string> v;
  if (!(mu > 0.0)) v.push_back("mu must be positive");
  if (!(kappa_a > 0.0)) v.push_back("kappa_a must be positive");
  if (!(kappa_b > 0.0 && kappa_b < 1.0)) v.push_back("kappa_b must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) v.push_back("shrink must lie in (0, 1)");
  if (!(conv_tol >= 0.0)) v.push_back("conv_tol must be nonnegative");
  if (max_outer < 1) v.push_back("max_outer must be at least 1");
  if (max_backtrack < 1) v.push_back("max_backtrack must be at least 1");
  if (restarts < 1) v.push_back("restarts must be at least 1");
  return v;
}

void OptimizerConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid optimizer config:";
  for (const auto& s : v) msg += " " + s + ";";
  throw Error(Errc::invalid_config, msg);
}

double logsumexp_objective(const VectorXd& rates, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::invalid_config, "mu must be positive");
  const double lo = rates.minCoeff();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < rates.size(); ++k) acc += std::exp(-mu * (rates[k] - lo));
  return lo - std::log(acc) / mu;
}

VectorXd logsumexp_weights(const VectorXd& rates, double mu) {
  const double lo = rates.minCoeff();
  VectorXd w(rates.size());
  for (Eigen::Index k = 0; k < rates.size(); ++k) w[k] = std::exp(-mu * (rates[k] - lo));
  return w / w.sum();
}

ObjectiveEval evaluate_objective(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                                 double mu, bool with_gradient) {
  ObjectiveEval out;
  RateBreakdown rate;
  std::vector<VectorXd> dsinr;
  if (!with_gradient) {
    rate = evaluate_rate(cfg, los, phase);
  } else if (cfg.correlated) {
    dsinr = grad_sinr_correlated(cfg, los, phase, &rate);
  } else {
    rate = rate_independent(cfg, los, phase);
    dsinr = grad_sinr_independent(cfg, los, phase);
  }
  out.rates = rate.rates();
  out.value = logsumexp_objective(out.rates, mu);
  if (!with_gradient) return out;
  // dR_k = prelog / (ln 2 (1 + SINR_k)) dSINR_k
  const VectorXd w = logsumexp_weights(out.rates, mu);
  out.grad = VectorXd::Zero(cfg.N);
  for (int k = 0; k < cfg.K; ++k)
    out.grad += w[k] * rate.prelog / (std::numbers::ln2 * (1.0 + rate.users[k].sinr)) * dsinr[k];
  return out;
}

VectorXd grad_objective(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase, double mu) {
  return evaluate_objective(cfg, los, phase, mu, true).grad;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_outer: return "max_outer";
    case StopReason::backtrack_exhausted: return "backtrack_exhausted";
  }
  return "unknown";
}

AscentResult gradient_ascent(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& theta0,
                             const OptimizerConfig& opt) {
  opt.validate();
  if (theta0.size() != cfg.N) throw Error(Errc::invalid_dimension, "theta0 length must equal N");
  AscentResult res;
  res.phase = theta0;
  ObjectiveEval cur = evaluate_objective(cfg, los, res.phase, opt.mu, true);
  res.trace.push_back({0, cur.value, 0.0});
  res.stop = StopReason::max_outer;
  for (int it = 1; it <= opt.max_outer; ++it) {
    const double g2 = cur.grad.squaredNorm();
    double step = opt.kappa_a;
    bool accepted = false;
    PhaseShifts next;
    double next_val = cur.value;
    for (int b = 0; b <= opt.max_backtrack; ++b) {
      next = PhaseShifts(res.phase.theta + step * cur.grad);
      next_val = evaluate_objective(cfg, los, next, opt.mu, false).value;
      if (!(next_val < cur.value + opt.kappa_b * step * g2)) {
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) {
      res.trace.push_back({it, cur.value, 0.0});
      res.stop = StopReason::backtrack_exhausted;
      break;
    }
    const double gain = next_val - cur.value;
    res.phase = std::move(next);
    cur = evaluate_objective(cfg, los, res.phase, opt.mu, true);
    res.trace.push_back({it, cur.value, step});
    if (gain < opt.conv_tol) {
      res.stop = StopReason::converged;
      break;
    }
  }
  res.objective = cur.value;
  res.min_rate = cur.rates.minCoeff();
  return res;
}

PhaseShifts random_phases(int N, std::uint64_t seed, std::uint64_t index) {
  Stream s(seed, index, Block::init);
  VectorXd t(N);
  for (int n = 0; n < N; ++n) t[n] = 2.0 * kPi * s.uniform();
  return PhaseShifts(std::move(t));
}

AscentResult optimize_phases(const SystemConfig& cfg, const LosGeometry& los, const OptimizerConfig& opt,
                             std::uint64_t seed) {
  opt.validate();
  AscentResult best;
  for (int r = 0; r < opt.restarts; ++r) {
    AscentResult cand = gradient_ascent(cfg, los, random_phases(cfg.N, seed, std::uint64_t(r)), opt);
    cand.restart = r;
    if (r == 0 || cand.objective > best.objective) best = std::move(cand);
  }
  return best;
}

SingleUserDesign single_user_design(const SystemConfig& cfg, const LosGeometry& los) {
  SingleUserDesign d;
  d.coeffs = single_user_snr_coeffs(cfg, los);
  const double N2 = double(cfg.N) * cfg.N;
  const double x0R = d.coeffs.x0R();
  bool full;
  if (x0R <= 0.0) {
    d.case_id = 1;
    full = true;
  } else if (x0R >= N2) {
    d.case_id = 2;
    full = false;
  } else {
    d.case_id = 3;
    full = !(d.coeffs.snr(0.0) > d.coeffs.snr(N2));
  }
  d.x = full ? N2 : 0.0;
  d.phase = full ? align_phases(cfg, 0) : cancel_phases(cfg, 0);
  return d;
}

PhaseShifts align_phases(const SystemConfig& cfg, int k) {
  if (cfg.N < 1) throw Error(Errc::invalid_dimension, "N must be positive");
  const VectorXd z = zeta(cfg, k);
  return from_offsets(z, VectorXd::Zero(cfg.N));
}

PhaseShifts cancel_phases(const SystemConfig& cfg, int k) {
  const int N = cfg.N;
  if (N < 2) throw Error(Errc::infeasible, "|f_k| = 1 for every phase when N = 1");
  const VectorXd z = zeta(cfg, k);
  // target total phase theta_n + zeta_n
  VectorXd target = VectorXd::Zero(N);
  const int paired = (N % 2 == 0) ? N : N - 3;
  for (int n = 0; n + 1 < paired; n += 2) target[n] = kPi;
  if (N % 2 == 1) {
    target[N - 3] = kPi / 3.0;
    target[N - 2] = -kPi / 3.0;
    target[N - 1] = kPi;
  }
  return from_offsets(z, target);
}

} // namespace rismimo
