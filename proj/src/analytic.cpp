#include "dmt/analytic.hpp"

#include <algorithm>
#include <numeric>

namespace dmt {

namespace {

// Corners from channels already in T-order: r(i) = K * (sum of the last i
// weights), d(i) = sum of the first K - i antenna counts. The tail sum equals
// 1 - (head sum) for normalized weights but keeps r(i) free of cancellation.
DmtCurve corners_from_sorted(const std::vector<double>& mu_sorted,
                             const std::vector<int>& n_sorted) {
  const std::size_t k = mu_sorted.size();
  const double kd = static_cast<double>(k);
  std::vector<Corner> corners(k + 1);
  double tail = 0.0;
  int head = std::accumulate(n_sorted.begin(), n_sorted.end(), 0);
  for (std::size_t i = 0; i <= k; ++i) {
    corners[i].r = kd * tail;
    corners[i].d = static_cast<double>(head);
    if (i < k) {
      tail += mu_sorted[k - 1 - i];
      head -= n_sorted[k - 1 - i];
    }
  }
  corners.front().r = 0.0;
  corners.back().r = kd;
  return DmtCurve(std::move(corners));
}

void check_r(double r, std::size_t k) {
  if (!(r >= 0.0) || r > static_cast<double>(k)) {
    throw Error(ErrorCode::OutOfRange, "multiplexing gain r=" + std::to_string(r) +
                                           " outside [0, " + std::to_string(k) + "]");
  }
}

}  // namespace

DmtCurve dmt_identical(std::size_t k, int n_t, const Weights& weights) {
  if (k != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dmt_identical: K differs from |weights|");
  }
  if (n_t < 1) throw Error(ErrorCode::InvalidArgument, "dmt_identical: n_t must be >= 1");
  std::vector<double> mu_sorted;
  for (std::size_t idx : weights.descending_order()) mu_sorted.push_back(weights[idx]);
  return corners_from_sorted(mu_sorted, std::vector<int>(k, n_t));
}

DmtCurve dmt_different(const AntennaProfile& profile, const Weights& weights) {
  const OrderingT t = ordering(weights, profile);
  return corners_from_sorted(t.apply(weights.values()), t.apply(profile.counts()));
}

DmtCurve dmt_bc_zf(int m, const Weights& weights) {
  const auto scenario = Scenario::bc_zf(m, weights);
  return dmt_identical(weights.size(), scenario.profile[0], weights);
}

DmtCurve dmt_bc_dpc(int m, const Weights& weights) {
  const auto scenario = Scenario::bc_dpc(m, weights);
  return dmt_different(scenario.profile, scenario.weights);
}

DmtCurve dmt_for(const Scenario& scenario) {
  switch (scenario.kind) {
    case ScenarioKind::ParallelIdentical:
      return dmt_identical(scenario.users(), scenario.m, scenario.weights);
    case ScenarioKind::ParallelDifferent:
      return dmt_different(scenario.profile, scenario.weights);
    case ScenarioKind::BcZf:
      return dmt_bc_zf(scenario.m, scenario.weights);
    case ScenarioKind::BcDpc:
      return dmt_bc_dpc(scenario.m, scenario.weights);
  }
  throw Error(ErrorCode::InvalidArgument, "dmt_for: unknown scenario kind");
}

ExponentSolution lp_greedy(const AntennaProfile& profile, const Weights& weights, double r) {
  const std::size_t k = weights.size();
  const OrderingT t = ordering(weights, profile);
  check_r(r, k);

  ExponentSolution sol;
  sol.alpha.assign(k, 1.0);
  if (r == 0.0) {
    sol.d = profile.total_diversity();
    return sol;
  }

  // Work in x_i = n_i alpha_i, so the constraint reads sum (mu_i/n_i) x_i >= b.
  double residual = 1.0 - r / static_cast<double>(k);
  sol.d = 0.0;
  for (std::size_t idx : t.perm()) {
    const double n = profile[idx];
    const double per_antenna = weights[idx] / n;
    const double x = std::min(std::max(residual, 0.0) / per_antenna, n);
    residual -= per_antenna * x;
    sol.alpha[idx] = x / n;
    sol.d += x;
  }
  return sol;
}

Weights optimal_weights(const AntennaProfile& profile) {
  const double total = profile.total_diversity();
  std::vector<double> mu;
  mu.reserve(profile.size());
  for (int n : profile.counts()) mu.push_back(n / total);
  return Weights::validate(mu);
}

}  // namespace dmt
