// SPDX-License-Identifier: MIT
#include "rismimo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace rismimo {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

// Column-major sample table: one column per statistic, one row per trial.
struct Samples {
  std::size_t trials = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Samples(std::size_t t, std::size_t c) : trials(t), cols(c), data(t * c, 0.0) {}
  double& at(std::size_t trial, std::size_t col) { return data[col * trials + trial]; }
  const double* column(std::size_t col) const { return data.data() + col * trials; }
  double mean(std::size_t col) const { return pairwise_sum(column(col), trials) / double(trials); }
};

// Mean and standard error of sum_j w_j X_j computed from per-trial values.
McEstimate linear_estimate(const Samples& s, const std::vector<std::pair<std::size_t, double>>& w, double value,
                           std::uint64_t seed) {
  std::vector<double> infl(s.trials, 0.0);
  for (const auto& [col, coef] : w) {
    const double m = s.mean(col);
    const double* x = s.column(col);
    for (std::size_t t = 0; t < s.trials; ++t) infl[t] += coef * (x[t] - m);
  }
  for (auto& v : infl) v *= v;
  const double var = pairwise_sum(infl.data(), infl.size()) / double(s.trials - 1);
  McEstimate e;
  e.mean = value;
  e.std_error = std::sqrt(var / double(s.trials));
  e.trials = s.trials;
  e.seed = seed;
  return e;
}

template <class Fn>
void run_trials(std::size_t trials, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::max<std::size_t>(1, trials))));
  if (threads == 1) {
    for (std::size_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (trials + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(trials, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      for (std::size_t t = lo; t < hi; ++t) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace

McSinrReport uatf_sinr_mc(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                          std::size_t trials, std::uint64_t seed, const McOptions& opts) {
  if (trials < kMinMcTrials)
    throw Error(Errc::insufficient_trials, "Monte Carlo needs at least 1000 trials");
  cfg.validate();
  const int K = cfg.K;
  // Columns per user k: Re z_kk, Im z_kk, |z_kk|^2, |z_ki|^2 (K of them, i == k unused), emi, noise.
  const std::size_t per_user = 3 + std::size_t(K) + 2;
  Samples S(trials, per_user * K);
  auto col = [&](int k, std::size_t j) { return std::size_t(k) * per_user + j; };

  std::optional<LmmseModel> lm;
  std::optional<UpsilonModel> um;
  if (cfg.correlated)
    um = upsilon_model(cfg, los, phase);
  else
    lm = lmmse_model(cfg, los, phase);
  const VectorXcd c = phase.c();
  const bool want_emi = cfg.correlated;

  run_trials(trials, opts.threads, [&](std::size_t t) {
    const ChannelRealization real = sample_channels(cfg, los, seed, t);
    const Observation obs = pilot_observation(real, cfg, los, phase, seed, t);
    const EstimateResult est = cfg.correlated ? lmmse_estimate(obs, *um) : lmmse_estimate(obs, *lm);
    MatrixXcd G; // R^{1/2} Phi^H H^H, so that the EMI form is ||G qhat||^2
    if (want_emi) {
      const MatrixXcd H = ris_bs_channel(real, cfg, los);
      G = los.corr->sqrt_R * (c.conjugate().asDiagonal() * H.adjoint());
    }
    for (int k = 0; k < K; ++k) {
      const VectorXcd& qh = est.q_hat[k];
      const cd z = qh.dot(obs.q[k]);
      S.at(t, col(k, 0)) = z.real();
      S.at(t, col(k, 1)) = z.imag();
      S.at(t, col(k, 2)) = std::norm(z);
      for (int i = 0; i < K; ++i)
        if (i != k) S.at(t, col(k, 3 + i)) = std::norm(qh.dot(obs.q[i]));
      S.at(t, col(k, 3 + K)) = want_emi ? (G * qh).squaredNorm() : 0.0;
      S.at(t, col(k, 4 + K)) = qh.squaredNorm();
    }
  });

  McSinrReport rep;
  rep.sinr.resize(K);
  rep.terms.resize(K);
  const double p = cfg.p;
  for (int k = 0; k < K; ++k) {
    const double a = S.mean(col(k, 0)), b = S.mean(col(k, 1));
    const double P = a * a + b * b;
    const double m2 = S.mean(col(k, 2));
    const double m4 = S.mean(col(k, 3 + K));
    const double m5 = S.mean(col(k, 4 + K));
    double m3 = 0.0;
    auto& T = rep.terms[k];
    T.I.resize(K);
    for (int i = 0; i < K; ++i) {
      if (i == k) continue;
      const double v = S.mean(col(k, 3 + i));
      m3 += v;
      T.I[i] = linear_estimate(S, {{col(k, 3 + i), 1.0}}, v, seed);
    }
    T.signal = linear_estimate(S, {{col(k, 0), 2 * a}, {col(k, 1), 2 * b}}, P, seed);
    T.leak = linear_estimate(S, {{col(k, 2), 1.0}, {col(k, 0), -2 * a}, {col(k, 1), -2 * b}}, m2 - P, seed);
    T.emi = linear_estimate(S, {{col(k, 3 + K), 1.0}}, m4, seed);
    T.noise = linear_estimate(S, {{col(k, 4 + K), 1.0}}, m5, seed);

    const double den = p * (m2 - P) + p * m3 + cfg.sigma_e2 * m4 + cfg.sigma2 * m5;
    const double sinr = den > 0.0 ? p * P / den : 0.0;
    std::vector<std::pair<std::size_t, double>> grad;
    if (den > 0.0) {
      const double dA = 2.0 * p * (den + p * P) / (den * den);
      const double dm = -p * sinr / den;
      grad = {{col(k, 0), dA * a}, {col(k, 1), dA * b}, {col(k, 2), dm},
              {col(k, 3 + K), -cfg.sigma_e2 * sinr / den}, {col(k, 4 + K), -cfg.sigma2 * sinr / den}};
      for (int i = 0; i < K; ++i)
        if (i != k) grad.push_back({col(k, 3 + i), dm});
    }
    rep.sinr[k] = linear_estimate(S, grad, sinr, seed);
  }
  return rep;
}

McRateReport rate_mc_report(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase,
                            std::size_t trials, std::uint64_t seed, const McOptions& opts) {
  McRateReport r;
  r.sinr = uatf_sinr_mc(cfg, los, phase, trials, seed, opts);
  r.prelog = cfg.prelog();
  for (const auto& s : r.sinr.sinr) {
    const double rate = r.prelog * std::log2(1.0 + s.mean);
    const double se = r.prelog / (std::log(2.0) * (1.0 + s.mean)) * s.std_error;
    r.rate.push_back(rate);
    r.std_error.push_back(se);
    r.ci_low.push_back(rate - 1.96 * se);
    r.ci_high.push_back(rate + 1.96 * se);
  }
  return r;
}

namespace {

MatrixXcd random_hermitian(Stream& s, int n) {
  MatrixXcd X(n, n);
  s.fill_cn(X);
  return 0.5 * (X + X.adjoint());
}

// Accumulates per-trial matrices and scores the mean against a target.
class MatrixMoment {
 public:
  MatrixMoment(std::string name, int rows, int cols, std::size_t trials)
      : name_(std::move(name)), rows_(rows), cols_(cols), trials_(trials),
        re_(trials * std::size_t(rows * cols)), im_(trials * std::size_t(rows * cols)) {}

  void add(std::size_t t, const MatrixXcd& X) {
    for (int j = 0; j < cols_; ++j)
      for (int i = 0; i < rows_; ++i) {
        const std::size_t e = std::size_t(j * rows_ + i);
        re_[e * trials_ + t] = X(i, j).real();
        im_[e * trials_ + t] = X(i, j).imag();
      }
  }

  MomentCheck score(const MatrixXcd& target) const {
    MomentCheck c;
    c.name = name_;
    MatrixXcd mean(rows_, cols_);
    double max_z = 0.0;
    bool exact_ok = true;
    for (int j = 0; j < cols_; ++j)
      for (int i = 0; i < rows_; ++i) {
        const std::size_t e = std::size_t(j * rows_ + i);
        const auto [mr, sr] = stats(re_.data() + e * trials_);
        const auto [mi, si] = stats(im_.data() + e * trials_);
        mean(i, j) = cd(mr, mi);
        max_z = std::max(max_z, zscore(mr, target(i, j).real(), sr, exact_ok));
        max_z = std::max(max_z, zscore(mi, target(i, j).imag(), si, exact_ok));
      }
    c.max_z = max_z;
    const double tn = target.norm();
    c.rel_error = tn > 0 ? (mean - target).norm() / tn : (mean - target).norm();
    c.pass = exact_ok && max_z <= 5.0;
    return c;
  }

 private:
  std::pair<double, double> stats(const double* x) const {
    const double m = pairwise_sum(x, trials_) / double(trials_);
    std::vector<double> d(trials_);
    for (std::size_t t = 0; t < trials_; ++t) d[t] = (x[t] - m) * (x[t] - m);
    const double var = pairwise_sum(d.data(), trials_) / double(trials_ - 1);
    return {m, std::sqrt(var / double(trials_))};
  }
  static double zscore(double est, double target, double se, bool& exact_ok) {
    if (se > 0.0) return std::abs(est - target) / se;
    if (std::abs(est - target) > 1e-12 * (1.0 + std::abs(target))) exact_ok = false;
    return 0.0;
  }

  std::string name_;
  int rows_, cols_;
  std::size_t trials_;
  std::vector<double> re_, im_;
};

} // namespace

std::vector<MomentCheck> moment_identity_suite(const SystemConfig& cfg, std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw Error(Errc::insufficient_trials, "moment suite needs at least 2 trials");
  const int M = cfg.M, N = cfg.N;
  Stream fixed(seed, ~std::uint64_t(0), Block::moments);
  const MatrixXcd W_N = random_hermitian(fixed, N);
  const MatrixXcd W_M = random_hermitian(fixed, M);
  const MatrixXcd C_M = random_hermitian(fixed, M);

  MatrixMoment xwx("E{X W X^H} = Tr{W} I", M, M, trials);
  MatrixMoment hwh("E{H W H} = 0", M, M, trials);
  MatrixMoment ucu("E{u u^H C u u^H} = C + Tr{C} I", M, M, trials);
  MatrixMoment hchw("E{H^H C H W H^H C H} = Tr{W} Tr{C^2} I + |Tr{C}|^2 W", N, N, trials);
  std::vector<double> u4(trials);

  for (std::size_t t = 0; t < trials; ++t) {
    Stream s(seed, t, Block::moments);
    MatrixXcd X(M, N), Hs(M, M), H(M, N);
    VectorXcd u(M);
    s.fill_cn(X);
    s.fill_cn(Hs);
    s.fill_cn(H);
    s.fill_cn(u);
    xwx.add(t, X * W_N * X.adjoint());
    hwh.add(t, Hs * W_M * Hs);
    const cd uCu = u.dot(C_M * u);
    ucu.add(t, uCu * (u * u.adjoint()));
    const MatrixXcd HCH = H.adjoint() * C_M * H;
    hchw.add(t, HCH * W_N * HCH);
    const double n2 = u.squaredNorm();
    u4[t] = n2 * n2;
  }

  std::vector<MomentCheck> out;
  out.push_back(xwx.score(W_N.trace() * MatrixXcd::Identity(M, M)));
  out.push_back(hwh.score(MatrixXcd::Zero(M, M)));
  out.push_back(ucu.score(C_M + C_M.trace() * MatrixXcd::Identity(M, M)));
  const cd trC = C_M.trace();
  out.push_back(hchw.score(W_N.trace() * (C_M * C_M).trace() * MatrixXcd::Identity(N, N) + std::norm(trC) * W_N));
  {
    MatrixMoment m4("E{||u||^4} = M^2 + M", 1, 1, trials);
    for (std::size_t t = 0; t < trials; ++t) m4.add(t, MatrixXcd::Constant(1, 1, u4[t]));
    out.push_back(m4.score(MatrixXcd::Constant(1, 1, double(M) * M + M)));
  }
  return out;
}

} // namespace rismimo
