// SPDX-License-Identifier: MIT
#include "helpers.hpp"

#include <doctest.h>

using namespace rismimo;
using namespace rismimo::testing;

namespace {

void identity_correlation(LosGeometry& los, int N) {
  los.corr->R_ris = MatrixXd::Identity(N, N);
  los.corr->R_emi = MatrixXd::Identity(N, N);
  los.corr->sqrt_R = MatrixXd::Identity(N, N);
}

} // namespace

TEST_CASE("identity correlation without EMI reduces to the independent engine") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SystemConfig cfg = random_config(seed, true);
    cfg.sigma_e2 = 0.0;
    LosGeometry cl = los_geometry(cfg);
    identity_correlation(cl, cfg.N);
    const PhaseShifts ph = random_phases(cfg.N, seed);
    const RateBreakdown c = rate_correlated(cfg, cl, ph);

    SystemConfig ind = cfg;
    ind.correlated = false;
    const RateBreakdown i = rate_independent(ind, los_geometry(ind), ph);
    for (int k = 0; k < cfg.K; ++k) {
      CHECK(rel_diff(c.users[k].sinr, i.users[k].sinr) < 1e-9);
      CHECK(rel_diff(c.users[k].E_noise, i.users[k].E_noise) < 1e-9);
    }
  }
}

TEST_CASE("Rayleigh RIS-BS link with identity correlation: noise term") {
  SystemConfig cfg = desk_correlated(8, 16, 3, 0.5, 30.0);
  cfg.delta = Rician{0.0, false};
  LosGeometry los = los_geometry(cfg);
  identity_correlation(los, 16);
  const RateBreakdown r = rate_correlated(cfg, los, random_phases(16, 3));
  const double tp = cfg.tau * cfg.p;
  for (int k = 0; k < 3; ++k) {
    const double g = 16 * cfg.beta * cfg.alpha[k] + cfg.gamma[k];
    const double expect = 8 * g * g / (g + cfg.sigma2 / tp + 16 * cfg.sigma_e2 * cfg.beta / tp);
    CHECK(rel_diff(r.users[k].E_noise, expect) < 1e-12);
  }
}

TEST_CASE("correlated signal term is the square of the noise term") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SystemConfig cfg = random_config(seed, true);
    const RateBreakdown r = rate_correlated(cfg, los_geometry(cfg), random_phases(cfg.N, seed));
    for (const auto& u : r.users) {
      CHECK(u.E_signal == u.E_noise * u.E_noise);
      CHECK(u.E_emi >= 0.0);
      CHECK(u.sinr > 0.0);
    }
    CHECK(r.correlated.has_value());
  }
}

TEST_CASE("trace of Upsilon matches the estimator and its derivative") {
  const SystemConfig cfg = random_config(2, true, 4, 9, 2);
  const LosGeometry los = los_geometry(cfg);
  const PhaseShifts ph = random_phases(9, 2);
  const RateBreakdown r = rate_correlated(cfg, los, ph);
  const UpsilonModel m = upsilon_model(cfg, los, ph);
  for (int k = 0; k < 2; ++k)
    CHECK(rel_diff(r.correlated->users[k].trace_upsilon, m.users[k].Upsilon.trace().real()) < 1e-10);

  Stream s(5, 0, Block::moments);
  MatrixXcd T(4, 4);
  s.fill_cn(T);
  for (int k = 0; k < 2; ++k) {
    const VectorXcd z = grad_trace_upsilon(T, cfg, los, ph, k);
    VectorXcd fd(9);
    const double h = 1e-5;
    for (int n = 0; n < 9; ++n) {
      VectorXd a = ph.theta, b = ph.theta;
      a[n] += h;
      b[n] -= h;
      const cd ta = (T * upsilon_model(cfg, los, PhaseShifts(a)).users[k].Upsilon).trace();
      const cd tb = (T * upsilon_model(cfg, los, PhaseShifts(b)).users[k].Upsilon).trace();
      fd[n] = (ta - tb) / (2.0 * h);
    }
    CHECK((z - fd).norm() / fd.norm() < 1e-6);
  }
}

TEST_CASE("correlated SINR gradient matches central differences") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SystemConfig cfg = random_config(seed, true, 4, 9, 3);
    const LosGeometry los = los_geometry(cfg);
    const PhaseShifts ph = random_phases(9, seed);
    RateBreakdown same;
    const auto g = grad_sinr_correlated(cfg, los, ph, &same);
    const RateBreakdown direct = rate_correlated(cfg, los, ph);
    for (int k = 0; k < 3; ++k) {
      CHECK(rel_diff(same.users[k].sinr, direct.users[k].sinr) < 1e-12);
      const VectorXd fd = central_diff(
          [&](const VectorXd& t) { return rate_correlated(cfg, los, PhaseShifts(t)).users[k].sinr; }, ph.theta);
      CHECK((g[k] - fd).norm() / fd.norm() < 1e-5);
    }
  }
}

TEST_CASE("correlated engine preconditions") {
  SystemConfig cfg = desk_correlated(4, 4, 2, 0.25, 30.0);
  LosGeometry los = los_geometry(cfg);
  cfg.epsilon[1] = Rician{3.0, false};
  try {
    rate_correlated(cfg, los, PhaseShifts::zeros(4));
    FAIL("expected unsupported_model");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_model);
  }
  const SystemConfig ind = desk(4, 4, 2);
  CHECK_THROWS_AS(rate_correlated(ind, los_geometry(ind), PhaseShifts::zeros(4)), Error);
  CHECK_THROWS_AS(grad_trace_upsilon(MatrixXcd::Identity(3, 3), desk_correlated(4, 4, 2, 0.25, 30.0), los,
                                     PhaseShifts::zeros(4), 0),
                  Error);
}

TEST_CASE("stronger EMI lowers every correlated SINR") {
  const SystemConfig lo = desk_correlated(8, 16, 3, 0.25, 10.0);
  const SystemConfig hi = desk_correlated(8, 16, 3, 0.25, 60.0);
  const PhaseShifts ph = random_phases(16, 2);
  const RateBreakdown a = rate_correlated(lo, los_geometry(lo), ph);
  const RateBreakdown b = rate_correlated(hi, los_geometry(hi), ph);
  for (int k = 0; k < 3; ++k) CHECK(b.users[k].sinr < a.users[k].sinr);
}
