// SPDX-License-Identifier: MIT
#include "helpers.hpp"

#include <doctest.h>

using namespace rismimo;
using namespace rismimo::testing;

TEST_CASE("fully deterministic channels give the closed form with zero spread") {
  SystemConfig cfg = desk(4, 4, 2);
  cfg.delta = Rician::inf();
  for (auto& e : cfg.epsilon) e = Rician::inf();
  for (auto& g : cfg.gamma) g = 0.0;
  const LosGeometry los = los_geometry(cfg);
  const PhaseShifts ph = random_phases(4, 3);
  const McSinrReport mc = uatf_sinr_mc(cfg, los, ph, 1000, 7);
  const RateBreakdown cf = rate_independent(cfg, los, ph);
  for (int k = 0; k < 2; ++k) {
    CHECK(rel_diff(mc.sinr[k].mean, cf.users[k].sinr) < 1e-9);
    CHECK(mc.terms[k].signal.std_error < 1e-9 * mc.terms[k].signal.mean);
  }
}

TEST_CASE("Monte Carlo terms agree with the closed form at small scale") {
  const SystemConfig cfg = desk(4, 4, 2);
  const LosGeometry los = los_geometry(cfg);
  const PhaseShifts ph = random_phases(4, 5);
  const McSinrReport mc = uatf_sinr_mc(cfg, los, ph, 4000, 11);
  const RateBreakdown cf = rate_independent(cfg, los, ph);
  for (int k = 0; k < 2; ++k) {
    const auto& t = mc.terms[k];
    const auto& u = cf.users[k];
    CHECK(std::abs(t.leak.mean - u.E_leak) < 5.0 * t.leak.std_error + 1e-3 * u.E_leak);
    CHECK(std::abs(t.I[1 - k].mean - u.I[1 - k]) < 5.0 * t.I[1 - k].std_error + 1e-3 * u.I[1 - k]);
    CHECK(rel_diff(mc.sinr[k].mean, u.sinr) < 0.06);
  }
}

TEST_CASE("moment identities") {
  SystemConfig cfg = desk(8, 6, 1);
  const auto checks = moment_identity_suite(cfg, 20000, 3);
  // four matrix identities plus the scalar fourth moment of ||u||
  REQUIRE(checks.size() == 5);
  CHECK(checks[4].rel_error < 0.03);
  for (const auto& c : checks) {
    INFO(c.name << " max_z=" << c.max_z << " rel=" << c.rel_error);
    CHECK(c.pass);
    CHECK(c.max_z < 5.0);
  }
}

TEST_CASE("standard error shrinks as one over the root of the trial count") {
  const SystemConfig cfg = desk(4, 4, 2);
  const LosGeometry los = los_geometry(cfg);
  const PhaseShifts ph = random_phases(4, 1);
  const McSinrReport a = uatf_sinr_mc(cfg, los, ph, 2000, 21);
  const McSinrReport b = uatf_sinr_mc(cfg, los, ph, 8000, 21);
  for (int k = 0; k < 2; ++k) {
    const double ratio = a.terms[k].noise.std_error / b.terms[k].noise.std_error;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
    CHECK(a.sinr[k].trials == 2000);
    CHECK(a.sinr[k].seed == 21);
  }
}

TEST_CASE("runs are reproducible and independent of the thread count") {
  const SystemConfig cfg = desk_correlated(4, 4, 2, 0.25, 30.0);
  const LosGeometry los = los_geometry(cfg);
  const PhaseShifts ph = random_phases(4, 1);
  McOptions one, three;
  three.threads = 3;
  const McRateReport a = rate_mc_report(cfg, los, ph, 1500, 9, one);
  const McRateReport b = rate_mc_report(cfg, los, ph, 1500, 9, one);
  const McRateReport c = rate_mc_report(cfg, los, ph, 1500, 9, three);
  const McRateReport d = rate_mc_report(cfg, los, ph, 1500, 10, one);
  for (int k = 0; k < 2; ++k) {
    CHECK(a.rate[k] == b.rate[k]);
    CHECK(a.rate[k] == c.rate[k]);
    CHECK(a.std_error[k] == c.std_error[k]);
    CHECK(a.rate[k] != d.rate[k]);
    CHECK(a.ci_low[k] < a.rate[k]);
    CHECK(a.rate[k] < a.ci_high[k]);
    CHECK(a.rate[k] == doctest::Approx(a.prelog * std::log2(1.0 + a.sinr.sinr[k].mean)));
  }
}

TEST_CASE("too few trials are rejected") {
  const SystemConfig cfg = desk(4, 4, 1);
  const LosGeometry los = los_geometry(cfg);
  try {
    uatf_sinr_mc(cfg, los, PhaseShifts::zeros(4), kMinMcTrials - 1, 1);
    FAIL("expected insufficient_trials");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_trials);
  }
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i);
  CHECK(pairwise_sum(v.data(), v.size()) == 500500.0);
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
  std::vector<double> tiny(1 << 16, 0.1);
  CHECK(std::abs(pairwise_sum(tiny.data(), tiny.size()) - 6553.6) < 1e-9);
}
