#pragma once

// Independent solvers for the outage-exponent linear program
//
//   minimize   sum_i c_i y_i
//   subject to 0 <= y_i <= u_i,  sum_i a_i y_i >= b
//
// used to certify the closed-form greedy solution. Two parameterizations
// are supported: the alpha form (c = n, a = mu, u = 1) and the x form
// (x_i = n_i alpha_i: c = 1, a = mu/n, u = n). Both yield alpha_i = y_i / u_i.

#include <cstddef>
#include <vector>

#include "dmt/analytic.hpp"
#include "dmt/core.hpp"

namespace dmt {

struct LpInstance {
  std::vector<double> costs;    // c_i > 0
  std::vector<double> coeffs;   // a_i > 0
  std::vector<double> upper;    // u_i > 0
  double bound = 0.0;           // b in [0, 1]

  static LpInstance alpha_form(const AntennaProfile& profile, const Weights& weights, double r);
  static LpInstance x_form(const AntennaProfile& profile, const Weights& weights, double r);

  std::size_t size() const noexcept { return costs.size(); }
  void check() const;
};

inline constexpr std::size_t kMaxVertexChannels = 16;
inline constexpr std::size_t kMaxGridChannels = 4;
inline constexpr double kFeasibilityTolerance = 1e-12;

/// Exact optimum by enumerating every basic point: each coordinate at 0 or
/// u_i except at most one, which makes the single inequality tight.
/// O(K 2^K); throws TooLarge for K > 16.
ExponentSolution lp_vertex(const LpInstance& instance);

/// Minimum objective over the lattice y_i in {0, u_i/res, ..., u_i}.
/// Never below the true optimum and at most sum_i c_i u_i / res above it.
/// Throws TooLarge for K > 4 and InvalidArgument for res < 50.
double lp_grid(const LpInstance& instance, int resolution);

}  // namespace dmt
