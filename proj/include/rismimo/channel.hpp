// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/config.hpp"
#include "rismimo/rng.hpp"

#include <optional>

namespace rismimo {

VectorXcd array_response_bs(int M, double spacing, double azimuth, double elevation);
VectorXcd array_response_ris(int N, double spacing, double azimuth, double elevation);

struct CorrelationMatrices {
  MatrixXd R_ris;
  MatrixXd R_emi;
  MatrixXd sqrt_R;
};

// Normalized-sinc correlation of a sqrt(N) x sqrt(N) grid with the given pitch.
CorrelationMatrices sinc_correlation(int N, double spacing);

// Everything that depends on the configuration but not on a random draw.
struct LosGeometry {
  VectorXcd a_M;                // BS response toward the RIS
  VectorXcd a_N;                // RIS response toward the BS
  MatrixXcd Hbar2;              // a_M a_N^H
  std::vector<VectorXcd> hbar;  // RIS response toward each user
  std::optional<CorrelationMatrices> corr; // present for the correlated model
};

LosGeometry los_geometry(const SystemConfig& cfg);

// Unit-variance scattered components. For the correlated model Htilde2 is
// already right-multiplied by R_ris^{1/2} and htilde stays empty.
struct ChannelRealization {
  MatrixXcd Htilde2;
  std::vector<VectorXcd> htilde;
  std::vector<VectorXcd> dtilde;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

ChannelRealization sample_channels(const SystemConfig& cfg, const LosGeometry& los,
                                   std::uint64_t seed, std::uint64_t trial = 0);

// Effective RIS-BS matrix H_2 (independent) or H_{c,2} (correlated).
MatrixXcd ris_bs_channel(const ChannelRealization& real, const SystemConfig& cfg,
                         const LosGeometry& los);

// The four cascaded terms and the direct term of one user's channel.
struct ChannelTerms {
  VectorXcd los_los, los_nlos, nlos_los, nlos_nlos, direct;
  VectorXcd sum() const { return los_los + los_nlos + nlos_los + nlos_nlos + direct; }
};

ChannelTerms channel_terms(const ChannelRealization& real, const SystemConfig& cfg,
                           const LosGeometry& los, const PhaseShifts& phase, int k);

std::vector<VectorXcd> aggregated_channel(const ChannelRealization& real, const SystemConfig& cfg,
                                          const LosGeometry& los, const PhaseShifts& phase);

struct Pathloss {
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> d_ub;
  double beta = 0.0;
};

// Users on a semicircle of radius d_ui around the RIS, BS at distance d_ib.
Pathloss scenario_geometry(double d_ui, double d_ib, int K);

// Eight-user scenario at the reference parameters (M = N = 64).
SystemConfig table_defaults();

// Keeps the first K users of cfg and resizes the arrays.
SystemConfig with_users(SystemConfig cfg, int K);

} // namespace rismimo
