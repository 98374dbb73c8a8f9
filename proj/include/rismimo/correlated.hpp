// SPDX-License-Identifier: MIT
#pragma once

#include "rismimo/rate_analytic.hpp"

namespace rismimo {

// Closed-form rate with RIS spatial correlation and EMI. Requires every
// epsilon_k to be infinite and los.corr to be populated.
RateBreakdown rate_correlated(const SystemConfig& cfg, const LosGeometry& los, const PhaseShifts& phase);

// dSINR_{c,k}/dtheta for every user; optionally returns the rate evaluated
// on the same pass.
std::vector<VectorXd> grad_sinr_correlated(const SystemConfig& cfg, const LosGeometry& los,
                                           const PhaseShifts& phase, RateBreakdown* rate_out = nullptr);

// z_k(T) = d Tr{T Upsilon_k} / dtheta, assembled from the three-term
// expression (psi_k^1, f_{c,1} and the EMI LoS block). Complex when T is
// not Hermitian.
VectorXcd grad_trace_upsilon(const MatrixXcd& T, const SystemConfig& cfg, const LosGeometry& los,
                             const PhaseShifts& phase, int k);

} // namespace rismimo
