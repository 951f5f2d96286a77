#pragma once

#include <span>
#include <string>
#include <vector>

#include "dmt/channel_sim.hpp"
#include "dmt/core.hpp"

namespace dmt {

struct SnrWindow {
  double min_db = 0.0;
  double max_db = 0.0;
  bool contains(double db) const { return db >= min_db - 1e-9 && db <= max_db + 1e-9; }
};

inline constexpr std::uint64_t kMinOutageEvents = 20;

struct SlopeFit {
  double d_hat = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  SnrWindow window;
  std::size_t points_used = 0;
  /// SNRs (dB) inside the window dropped for having fewer than 20 events.
  std::vector<double> dropped_db;
};

/// Weighted least-squares slope of -log10(p_hat) against log10(rho) over the
/// estimates inside `window`, weights 1/var(log10 p_hat) by the delta method.
/// Throws InsufficientData (< 2 usable points) or InsufficientEvents (points
/// in the window exist but too few have 20+ outages).
SlopeFit fit_slope(std::span<const OutageEstimate> estimates, SnrWindow window);

struct Verdict {
  double r = 0.0;
  double d_hat = 0.0;
  double std_error = 0.0;
  double d_analytic = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kDefaultSlopeTolerance = 0.15;

/// Pass iff |d_hat - d(r)| <= tol d(r) + 2 stderr.
Verdict compare(const SlopeFit& fit, const DmtCurve& curve, double r,
                double tol = kDefaultSlopeTolerance);

std::string describe(const Verdict& v);

}  // namespace dmt
