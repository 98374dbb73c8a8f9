// SPDX-License-Identifier: MIT
#include "rismimo/channel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace rismimo {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t lo32(std::uint64_t x) { return std::uint32_t(x & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t x) { return std::uint32_t(x >> 32); }

// Normalized sinc; exact zero at nonzero integers.
double sinc(double x) {
  if (x == 0.0) return 1.0;
  double r = std::round(x);
  if (r == x) return 0.0;
  return std::sin(kPi * x) / (kPi * x);
}

} // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t trial, Block block) {
  const auto b = static_cast<std::uint64_t>(block);
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(trial), hi32(trial), lo32(b), hi32(b)};
  engine_.seed(seq);
}

cd Stream::cn(double var) {
  const double s = std::sqrt(var / 2.0);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {s * re, s * im};
}

void Stream::fill_cn(MatrixXcd& m, double var) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = cn(var);
}

void Stream::fill_cn(VectorXcd& v, double var) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cn(var);
}

VectorXcd array_response_bs(int M, double spacing, double azimuth, double elevation) {
  if (M <= 0) throw Error(Errc::invalid_dimension, "array_response_bs: M must be positive");
  VectorXcd a(M);
  const double step = 2.0 * kPi * spacing * std::sin(elevation) * std::sin(azimuth);
  for (int x = 0; x < M; ++x) a[x] = std::polar(1.0, step * x);
  return a;
}

VectorXcd array_response_ris(int N, double spacing, double azimuth, double elevation) {
  const int side = isqrt_exact(N);
  VectorXcd a(N);
  const double row = std::sin(elevation) * std::sin(azimuth);
  const double col = std::cos(elevation);
  for (int x = 0; x < N; ++x) {
    const int r = x / side, c = x % side;
    a[x] = std::polar(1.0, 2.0 * kPi * spacing * (r * row + c * col));
  }
  return a;
}

CorrelationMatrices sinc_correlation(int N, double spacing) {
  const int side = isqrt_exact(N);
  MatrixXd R(N, N);
  for (int a = 0; a < N; ++a) {
    for (int b = a; b < N; ++b) {
      const double dr = a / side - b / side;
      const double dc = a % side - b % side;
      const double dist = spacing * std::sqrt(dr * dr + dc * dc);
      R(a, b) = R(b, a) = sinc(2.0 * dist);
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(R);
  VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  MatrixXd S = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  S = 0.5 * (S + S.transpose()).eval();
  return CorrelationMatrices{R, R, S};
}

LosGeometry los_geometry(const SystemConfig& cfg) {
  cfg.validate();
  LosGeometry g;
  g.a_M = array_response_bs(cfg.M, cfg.d_bs, cfg.bs_arrival.azimuth, cfg.bs_arrival.elevation);
  g.a_N = array_response_ris(cfg.N, cfg.d_ris, cfg.ris_departure.azimuth, cfg.ris_departure.elevation);
  g.Hbar2 = g.a_M * g.a_N.adjoint();
  g.hbar.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const auto& d = cfg.user_arrival[k];
    g.hbar.push_back(array_response_ris(cfg.N, cfg.d_ris, d.azimuth, d.elevation));
  }
  if (cfg.correlated) g.corr = sinc_correlation(cfg.N, cfg.d_ris);
  return g;
}

ChannelRealization sample_channels(const SystemConfig& cfg, const LosGeometry& los,
                                   std::uint64_t seed, std::uint64_t trial) {
  ChannelRealization r;
  r.seed = seed;
  r.trial = trial;
  {
    Stream s(seed, trial, Block::ris_bs);
    r.Htilde2.resize(cfg.M, cfg.N);
    s.fill_cn(r.Htilde2);
    if (cfg.correlated) r.Htilde2 = (r.Htilde2 * los.corr->sqrt_R).eval();
  }
  if (!cfg.correlated) {
    Stream s(seed, trial, Block::user_ris);
    r.htilde.assign(cfg.K, VectorXcd(cfg.N));
    for (auto& h : r.htilde) s.fill_cn(h);
  }
  {
    Stream s(seed, trial, Block::direct);
    r.dtilde.assign(cfg.K, VectorXcd(cfg.M));
    for (auto& d : r.dtilde) s.fill_cn(d);
  }
  return r;
}

MatrixXcd ris_bs_channel(const ChannelRealization& real, const SystemConfig& cfg,
                         const LosGeometry& los) {
  const double los_amp = std::sqrt(cfg.beta * cfg.delta.los());
  const double nlos_amp = std::sqrt(cfg.beta * cfg.delta.nlos());
  return los_amp * los.Hbar2 + nlos_amp * real.Htilde2;
}

ChannelTerms channel_terms(const ChannelRealization& real, const SystemConfig& cfg,
                           const LosGeometry& los, const PhaseShifts& phase, int k) {
  const UserWeights w = user_weights(cfg, k);
  const VectorXcd c = phase.c();
  const VectorXcd phi_hbar = c.cwiseProduct(los.hbar[k]);
  ChannelTerms t;
  t.los_los = std::sqrt(w.ll) * los.a_M * los.a_N.dot(phi_hbar);
  t.nlos_los = std::sqrt(w.nl) * (real.Htilde2 * phi_hbar);
  if (cfg.correlated) {
    if (!cfg.epsilon[k].infinite)
      throw Error(Errc::unsupported_model, "correlated model requires fully LoS user-RIS links");
    t.los_nlos = VectorXcd::Zero(cfg.M);
    t.nlos_nlos = VectorXcd::Zero(cfg.M);
  } else {
    const VectorXcd phi_htilde = c.cwiseProduct(real.htilde[k]);
    t.los_nlos = std::sqrt(w.ln) * los.a_M * los.a_N.dot(phi_htilde);
    t.nlos_nlos = std::sqrt(w.nn) * (real.Htilde2 * phi_htilde);
  }
  t.direct = std::sqrt(w.gamma) * real.dtilde[k];
  return t;
}

std::vector<VectorXcd> aggregated_channel(const ChannelRealization& real, const SystemConfig& cfg,
                                          const LosGeometry& los, const PhaseShifts& phase) {
  if (phase.size() != cfg.N) throw Error(Errc::invalid_dimension, "phase vector length must equal N");
  std::vector<VectorXcd> q;
  q.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) q.push_back(channel_terms(real, cfg, los, phase, k).sum());
  return q;
}

Pathloss scenario_geometry(double d_ui, double d_ib, int K) {
  if (!(d_ui >= 0.0) || !(d_ib > 0.0) || K <= 0)
    throw Error(Errc::invalid_geometry, "scenario_geometry needs d_ui >= 0, d_ib > 0, K > 0");
  Pathloss pl;
  pl.beta = 1e-3 * std::pow(d_ib, -2.5);
  for (int k = 1; k <= K; ++k) {
    const double ang = kPi * k / double(K + 1);
    const double x = d_ib - d_ui * std::cos(ang);
    const double y = d_ui * std::sin(ang);
    const double d = std::sqrt(x * x + y * y);
    if (!(d > 0.0)) throw Error(Errc::invalid_geometry, "user coincides with the BS");
    pl.d_ub.push_back(d);
    pl.gamma.push_back(1e-3 * std::pow(d, -4.0));
    // d_ui = 0 puts every user on the RIS; the far-field law has no finite value there.
    pl.alpha.push_back(d_ui > 0.0 ? 1e-3 * std::pow(d_ui, -2.0) : std::numeric_limits<double>::infinity());
  }
  return pl;
}

SystemConfig table_defaults() {
  SystemConfig c;
  c.M = 64;
  c.N = 64;
  c.K = 8;
  c.p = dbm_to_watt(30.0);
  c.sigma2 = dbm_to_watt(-104.0);
  c.sigma_e2 = 0.0;
  c.tau = 8;
  c.tau_c = 196;
  c.delta = Rician{1.0, false};
  c.epsilon.assign(8, Rician{10.0, false});
  const Pathloss pl = scenario_geometry(20.0, 700.0, 8);
  c.alpha = pl.alpha;
  c.gamma = pl.gamma;
  c.beta = pl.beta;
  c.d_bs = 0.5;
  c.d_ris = 0.5;
  c.ris_departure = {4.17, 0.09};
  c.bs_arrival = {6.28, 4.21};
  c.user_arrival = {{5.20, 4.32}, {0.41, 2.52}, {3.84, 1.78}, {1.35, 4.15},
                    {5.08, 5.76}, {4.75, 1.56}, {4.74, 5.36}, {0.09, 1.40}};
  return c;
}

SystemConfig with_users(SystemConfig cfg, int K) {
  if (K <= 0 || K > cfg.K) throw Error(Errc::invalid_config, "with_users: K out of range");
  cfg.K = K;
  cfg.epsilon.resize(K);
  cfg.alpha.resize(K);
  cfg.gamma.resize(K);
  cfg.user_arrival.resize(K);
  return cfg;
}

} // namespace rismimo
