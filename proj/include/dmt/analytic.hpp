#pragma once

#include <vector>

#include "dmt/core.hpp"

namespace dmt {

/// Per-channel outage exponents alpha_k in [0,1] and the resulting
/// diversity d = sum_k n_k alpha_k. `alpha` is in original channel order.
struct ExponentSolution {
  std::vector<double> alpha;
  double d = 0.0;
};

/// K parallel identical n_t x 1 channels. Weights may be unordered; they
/// are sorted descending internally (ties by index).
DmtCurve dmt_identical(std::size_t k, int n_t, const Weights& weights);

/// K parallel channels with n_i antennas each, ordered by mu_i / n_i.
DmtCurve dmt_different(const AntennaProfile& profile, const Weights& weights);

/// Broadcast channel, zero-forcing precoding: K identical channels with
/// M - K + 1 degrees of freedom each.
DmtCurve dmt_bc_zf(int m, const Weights& weights);

/// Broadcast channel, dirty-paper coding encoded in decreasing-weight order:
/// the j-th user sees M - j + 1 degrees of freedom.
DmtCurve dmt_bc_dpc(int m, const Weights& weights);

DmtCurve dmt_for(const Scenario& scenario);

/// Closed-form optimum of
///   min sum n_k alpha_k  s.t.  0 <= alpha_k <= 1,  sum mu_k alpha_k >= 1 - r/K
/// by filling channels in decreasing mu_k / n_k order.
ExponentSolution lp_greedy(const AntennaProfile& profile, const Weights& weights, double r);

/// mu_i = n_i / sum_j n_j; the resulting curve is the straight line
/// d(0) (1 - r/K), which dominates every other weighting.
Weights optimal_weights(const AntennaProfile& profile);

}  // namespace dmt
