#include "dmt/lp_oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace dmt {

namespace {

LpInstance make_instance(const AntennaProfile& profile, const Weights& weights, double r) {
  if (profile.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "LpInstance: profile and weights differ in size");
  }
  const double k = static_cast<double>(weights.size());
  if (!(r >= 0.0) || r > k) {
    throw Error(ErrorCode::OutOfRange, "LpInstance: r outside [0, K]");
  }
  LpInstance inst;
  inst.bound = (r == 0.0) ? 1.0 : std::max(0.0, 1.0 - r / k);
  return inst;
}

}  // namespace

LpInstance LpInstance::alpha_form(const AntennaProfile& profile, const Weights& weights,
                                  double r) {
  LpInstance inst = make_instance(profile, weights, r);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    inst.costs.push_back(profile[i]);
    inst.coeffs.push_back(weights[i]);
    inst.upper.push_back(1.0);
  }
  return inst;
}

LpInstance LpInstance::x_form(const AntennaProfile& profile, const Weights& weights, double r) {
  LpInstance inst = make_instance(profile, weights, r);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    inst.costs.push_back(1.0);
    inst.coeffs.push_back(weights[i] / profile[i]);
    inst.upper.push_back(profile[i]);
  }
  return inst;
}

void LpInstance::check() const {
  const std::size_t k = costs.size();
  if (k == 0 || coeffs.size() != k || upper.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "LpInstance: inconsistent sizes");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(costs[i] > 0.0) || !(coeffs[i] > 0.0) || !(upper[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "LpInstance: coefficients must be positive");
    }
  }
  if (!(bound >= 0.0) || bound > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "LpInstance: bound outside [0, 1]");
  }
}

ExponentSolution lp_vertex(const LpInstance& inst) {
  inst.check();
  const std::size_t k = inst.size();
  if (k > kMaxVertexChannels) {
    throw Error(ErrorCode::TooLarge, "lp_vertex: K=" + std::to_string(k) + " exceeds 16");
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_y;
  std::vector<double> y(k);

  const std::uint32_t subsets = std::uint32_t{1} << k;
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    double covered = 0.0;
    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::uint32_t{1} << i)) {
        covered += inst.coeffs[i] * inst.upper[i];
        cost += inst.costs[i] * inst.upper[i];
      }
    }
    const double residual = inst.bound - covered;

    auto consider = [&](std::size_t frac, double frac_value) {
      double total = cost;
      if (frac < k) total += inst.costs[frac] * frac_value;
      if (total < best) {
        best = total;
        for (std::size_t i = 0; i < k; ++i) {
          y[i] = (mask & (std::uint32_t{1} << i)) ? inst.upper[i] : 0.0;
        }
        if (frac < k) y[frac] = frac_value;
        best_y = y;
      }
    };

    // No fractional coordinate: the saturated set alone must be feasible.
    if (residual <= kFeasibilityTolerance) consider(k, 0.0);
    // One coordinate outside the saturated set makes the constraint tight.
    if (residual > 0.0) {
      for (std::size_t f = 0; f < k; ++f) {
        if (mask & (std::uint32_t{1} << f)) continue;
        const double value = residual / inst.coeffs[f];
        if (value <= inst.upper[f]) consider(f, value);
      }
    }
  }

  ExponentSolution sol;
  sol.alpha.resize(k);
  for (std::size_t i = 0; i < k; ++i) sol.alpha[i] = best_y[i] / inst.upper[i];
  sol.d = best;
  return sol;
}

double lp_grid(const LpInstance& inst, int resolution) {
  inst.check();
  const std::size_t k = inst.size();
  if (k > kMaxGridChannels) {
    throw Error(ErrorCode::TooLarge, "lp_grid: K=" + std::to_string(k) + " exceeds 4");
  }
  if (resolution < 50) {
    throw Error(ErrorCode::InvalidArgument, "lp_grid: resolution must be >= 50");
  }
  const double res = resolution;

  // Axes in increasing cost per unit of coverage, so the relaxation of any
  // suffix is filled front to back.
  std::vector<std::size_t> axes(k);
  std::iota(axes.begin(), axes.end(), std::size_t{0});
  std::stable_sort(axes.begin(), axes.end(), [&](std::size_t a, std::size_t b) {
    return inst.costs[a] / inst.coeffs[a] < inst.costs[b] / inst.coeffs[b];
  });
  std::vector<double> cover(k), cost_full(k), suffix_cover(k + 1, 0.0);
  for (std::size_t p = 0; p < k; ++p) {
    cover[p] = inst.coeffs[axes[p]] * inst.upper[axes[p]];
    cost_full[p] = inst.costs[axes[p]] * inst.upper[axes[p]];
  }
  for (std::size_t p = k; p-- > 0;) suffix_cover[p] = suffix_cover[p + 1] + cover[p];

  // Continuous optimum for covering `residual` with axes p..K-1: a lower
  // bound on every lattice completion.
  auto relaxation = [&](std::size_t p, double residual) {
    double c = 0.0;
    for (; p < k && residual > 0.0; ++p) {
      const double take = std::min(residual, cover[p]);
      c += cost_full[p] * (take / cover[p]);
      residual -= take;
    }
    return residual > kFeasibilityTolerance ? std::numeric_limits<double>::infinity() : c;
  };

  // All coordinates at their upper limit is always feasible (b <= 1 = sum a u
  // for normalized instances); fall back to +inf otherwise.
  double best = std::numeric_limits<double>::infinity();
  {
    double cost = 0.0;
    for (std::size_t p = 0; p < k; ++p) cost += cost_full[p];
    if (suffix_cover[0] >= inst.bound - kFeasibilityTolerance) best = cost;
  }

  std::function<void(std::size_t, double, double)> search = [&](std::size_t p, double cost,
                                                               double residual) {
    if (residual <= kFeasibilityTolerance) {
      best = std::min(best, cost);
      return;
    }
    if (cost + relaxation(p, residual) >= best) return;
    const double step_cover = cover[p] / res;
    const double step_cost = cost_full[p] / res;
    // Below j_min the later axes cannot close the gap even when saturated.
    const double need = (residual - suffix_cover[p + 1]) / step_cover;
    const int j_min = need <= 0.0 ? 0 : std::max(0, static_cast<int>(std::ceil(need)) - 1);
    for (int j = j_min; j <= resolution; ++j) {
      const double c = cost + j * step_cost;
      const double left = residual - j * step_cover;
      if (c + relaxation(p + 1, std::max(left, 0.0)) >= best) {
        // Cost rises with j; once past the gap nothing further can help.
        if (left <= 0.0) break;
        continue;
      }
      if (p + 1 == k) {
        if (left <= kFeasibilityTolerance) {
          best = std::min(best, c);
          break;
        }
        continue;
      }
      search(p + 1, c, left);
      if (left <= kFeasibilityTolerance) break;
    }
  };
  search(0, 0.0, inst.bound);
  return best;
}

}  // namespace dmt
