// SPDX-License-Identifier: MIT
#include "rismimo/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace rismimo {

namespace {

double signal_power(const VectorXcd& w, const VectorXcd& x) {
  const double n2 = w.squaredNorm();
  return n2 > 0.0 ? std::norm(w.dot(x)) / n2 : 0.0;
}

// Per-entry LMMSE from y = g + n, n ~ CN(0, s), prior mean m and variance v.
template <class Mat>
Mat entry_lmmse(const Mat& truth, const Mat& mean, double v, double s, Stream& rng) {
  Mat y = truth;
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += rng.cn(s);
  const double gain = (v + s) > 0.0 ? v / (v + s) : 0.0;
  return mean + gain * (y - mean);
}

} // namespace

AlternatingResult alternating_design(const MatrixXcd& G, const VectorXcd& d, double tol, int max_iter) {
  if (G.rows() != d.size()) throw Error(Errc::invalid_dimension, "G and d must have the same row count");
  AlternatingResult r;
  r.v = VectorXcd::Ones(G.cols());
  r.w = G * r.v + d;
  double prev = signal_power(r.w, G * r.v + d);
  r.objective.push_back(prev);
  for (int it = 0; it < max_iter; ++it) {
    // phase step: align every w^H g_n v_n with w^H d
    const VectorXcd b = G.adjoint() * r.w; // conj of (w^H G)_n
    const double ref = std::arg(r.w.dot(d));
    for (Eigen::Index n = 0; n < r.v.size(); ++n) r.v[n] = std::polar(1.0, ref + std::arg(b[n]));
    const VectorXcd x = G * r.v + d;
    r.objective.push_back(signal_power(r.w, x));
    // combiner step
    r.w = x;
    const double cur = signal_power(r.w, x);
    r.objective.push_back(cur);
    r.iterations = it + 1;
    if (cur - prev <= tol * std::max(prev, 1e-300)) break;
    prev = cur;
  }
  return r;
}

double overhead_prelog(int N, int tau_c) { return std::max(0.0, 1.0 - double(N + 1) / double(tau_c)); }

double idealized_prelog(int tau_c) { return 1.0 - 1.0 / double(tau_c); }

BaselineReport instantaneous_scheme(const SystemConfig& cfg, int intervals, int trials_per_interval,
                                    std::uint64_t seed) {
  if (cfg.K != 1) throw Error(Errc::unsupported_model, "instantaneous-CSI baseline supports K = 1 only");
  if (cfg.correlated) throw Error(Errc::unsupported_model, "instantaneous-CSI baseline uses the independent model");
  if (intervals < 1 || trials_per_interval < 1)
    throw Error(Errc::invalid_config, "intervals and trials_per_interval must be positive");
  cfg.validate();
  const LosGeometry los = los_geometry(cfg);
  const double alpha = cfg.alpha[0];
  const Rician eps = cfg.epsilon[0];
  const double s = cfg.sigma2 / cfg.p; // one pilot symbol per unknown
  // LoS part of G and its per-entry scattered variance
  const MatrixXcd G_mean =
      std::sqrt(cfg.beta * cfg.delta.los() * alpha * eps.los()) * los.Hbar2 * los.hbar[0].asDiagonal();
  const double v_G = cfg.beta * alpha * (1.0 - cfg.delta.los() * eps.los());
  const double v_d = cfg.gamma[0];
  const VectorXcd d_mean = VectorXcd::Zero(cfg.M);

  std::vector<double> log_terms;
  std::vector<double> snrs;
  log_terms.reserve(std::size_t(intervals) * trials_per_interval);
  for (int i = 0; i < intervals; ++i) {
    const ChannelRealization real = sample_channels(cfg, los, seed, std::uint64_t(i));
    const MatrixXcd H2 = ris_bs_channel(real, cfg, los);
    const VectorXcd h = std::sqrt(alpha) * (std::sqrt(eps.los()) * los.hbar[0] + std::sqrt(eps.nlos()) * real.htilde[0]);
    const MatrixXcd G = H2 * h.asDiagonal();
    const VectorXcd d = std::sqrt(v_d) * real.dtilde[0];
    for (int t = 0; t < trials_per_interval; ++t) {
      Stream rng(seed, std::uint64_t(i) * std::uint64_t(trials_per_interval) + std::uint64_t(t),
                 Block::baseline_estimate);
      const MatrixXcd G_hat = entry_lmmse(G, G_mean, v_G, s, rng);
      const VectorXcd d_hat = entry_lmmse(d, d_mean, v_d, s, rng);
      const AlternatingResult a = alternating_design(G_hat, d_hat);
      const VectorXcd& w = a.w;
      const double sig = std::norm(w.dot(G_hat * a.v + d_hat));
      const double err = std::norm(w.dot((G - G_hat) * a.v + (d - d_hat)));
      const double den = cfg.p * err + cfg.sigma2 * w.squaredNorm();
      const double snr = den > 0.0 ? cfg.p * sig / den : 0.0;
      snrs.push_back(snr);
      log_terms.push_back(std::log2(1.0 + snr));
    }
  }
  double mean_log = 0.0, mean_snr = 0.0;
  for (double x : log_terms) mean_log += x;
  for (double x : snrs) mean_snr += x;
  mean_log /= double(log_terms.size());
  mean_snr /= double(snrs.size());

  BaselineReport rep;
  rep.intervals = intervals;
  rep.trials_per_interval = trials_per_interval;
  rep.avg_snr = mean_snr;
  rep.avg_rate_with_overhead = overhead_prelog(cfg.N, cfg.tau_c) * mean_log;
  rep.avg_rate_idealized = idealized_prelog(cfg.tau_c) * mean_log;
  return rep;
}

} // namespace rismimo
