// SPDX-License-Identifier: MIT
#include "helpers.hpp"

#include <doctest.h>

using namespace rismimo;
using namespace rismimo::testing;

TEST_CASE("prelog factors") {
  CHECK(overhead_prelog(15, 196) == doctest::Approx(1.0 - 16.0 / 196.0));
  CHECK(overhead_prelog(195, 196) == 0.0);
  CHECK(overhead_prelog(400, 196) == 0.0);
  CHECK(idealized_prelog(196) == doctest::Approx(195.0 / 196.0));
}

TEST_CASE("pilot overhead covering the whole interval leaves zero rate") {
  SystemConfig cfg = desk(4, 16, 1);
  cfg.tau = 1;
  cfg.tau_c = 17;
  const BaselineReport r = instantaneous_scheme(cfg, 3, 2, 1);
  CHECK(r.avg_rate_with_overhead == 0.0);
  CHECK(r.avg_rate_idealized > 0.0);
  CHECK(r.intervals == 3);
  CHECK(r.trials_per_interval == 2);
}

TEST_CASE("alternating design never lowers the desired-signal power") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Stream s(seed, 0, Block::moments);
    MatrixXcd G(8, 16);
    VectorXcd d(8);
    s.fill_cn(G);
    s.fill_cn(d, 0.3);
    const AlternatingResult r = alternating_design(G, d);
    REQUIRE(r.objective.size() >= 3);
    for (std::size_t i = 1; i < r.objective.size(); ++i)
      CHECK(r.objective[i] >= r.objective[i - 1] * (1.0 - 1e-12));
    for (Eigen::Index n = 0; n < r.v.size(); ++n) CHECK(std::abs(std::abs(r.v[n]) - 1.0) < 1e-12);
    const VectorXcd x = G * r.v + d;
    CHECK(rel_diff(r.objective.back(), std::norm(r.w.dot(x)) / r.w.squaredNorm()) < 1e-12);
    CHECK(r.iterations <= 100);
  }
  CHECK_THROWS_AS(alternating_design(MatrixXcd::Ones(3, 4), VectorXcd::Ones(2)), Error);
}

TEST_CASE("alternating design with a single column aligns it with the direct path") {
  MatrixXcd G(2, 1);
  G << cd(1, 1), cd(0, 2);
  VectorXcd d(2);
  d << cd(0.5, 0), cd(0, -0.5);
  const AlternatingResult r = alternating_design(G, d);
  // v* = argmax ||g v + d||, reached when g v and d are collinear in phase
  double best = 0.0;
  for (int i = 0; i < 3600; ++i) best = std::max(best, (G.col(0) * std::polar(1.0, 2 * kPi * i / 3600.0) + d).squaredNorm());
  CHECK(r.objective.back() >= best * (1.0 - 1e-5));
}

TEST_CASE("overhead rate never exceeds the idealized rate and runs reproduce") {
  SystemConfig cfg = desk(8, 16, 1);
  cfg.tau = 1;
  const BaselineReport a = instantaneous_scheme(cfg, 6, 2, 4);
  const BaselineReport b = instantaneous_scheme(cfg, 6, 2, 4);
  CHECK(a.avg_rate_with_overhead <= a.avg_rate_idealized);
  CHECK(a.avg_rate_with_overhead == b.avg_rate_with_overhead);
  CHECK(a.avg_snr > 0.0);
  CHECK(rel_diff(a.avg_rate_with_overhead / a.avg_rate_idealized,
                 overhead_prelog(16, cfg.tau_c) / idealized_prelog(cfg.tau_c)) < 1e-12);
}

TEST_CASE("baseline preconditions") {
  try {
    instantaneous_scheme(desk(4, 4, 2), 2, 2, 1);
    FAIL("expected unsupported_model");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_model);
  }
  CHECK_THROWS_AS(instantaneous_scheme(desk_correlated(4, 4, 1, 0.25, 30.0), 2, 2, 1), Error);
  CHECK_THROWS_AS(instantaneous_scheme(desk(4, 4, 1), 0, 2, 1), Error);
}
