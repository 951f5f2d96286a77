#include "dmt/exponent_fit.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace dmt {

SlopeFit fit_slope(std::span<const OutageEstimate> estimates, SnrWindow window) {
  SlopeFit fit;
  fit.window = window;

  std::vector<double> xs, ys, ws;
  for (const auto& e : estimates) {
    if (!window.contains(e.rho_db)) continue;
    if (e.n_outages < kMinOutageEvents || !(e.p_hat > 0.0) || e.p_hat >= 1.0) {
      fit.dropped_db.push_back(e.rho_db);
      continue;
    }
    const double p = e.p_hat;
    const double n = static_cast<double>(e.n_samples);
    const double var_log10 =
        (1.0 - p) / (n * p) / (std::numbers::ln10 * std::numbers::ln10);
    xs.push_back(std::log10(e.rho));
    ys.push_back(-std::log10(p));
    ws.push_back(1.0 / var_log10);
  }

  if (xs.size() < 2) {
    std::string msg = "fit_slope: " + std::to_string(xs.size()) + " usable point(s) in [" +
                      std::to_string(window.min_db) + ", " + std::to_string(window.max_db) +
                      "] dB";
    if (!fit.dropped_db.empty()) {
      msg += "; dropped for < 20 outages at";
      for (double db : fit.dropped_db) msg += " " + std::to_string(db);
      msg += " dB";
      throw Error(ErrorCode::InsufficientEvents, msg);
    }
    throw Error(ErrorCode::InsufficientData, msg);
  }

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
    sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::InsufficientData, "fit_slope: all usable points share one SNR");
  }
  fit.d_hat = sxy / sxx;
  fit.intercept = ybar - fit.d_hat * xbar;
  fit.points_used = xs.size();

  // Two points leave no residual degrees of freedom; fall back to the
  // variance implied by the weights alone.
  if (xs.size() == 2) {
    fit.std_error = std::sqrt(1.0 / sxx);
  } else {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double res = ys[i] - (fit.intercept + fit.d_hat * xs[i]);
      chi2 += ws[i] * res * res;
    }
    fit.std_error = std::sqrt(chi2 / static_cast<double>(xs.size() - 2) / sxx);
  }
  return fit;
}

Verdict compare(const SlopeFit& fit, const DmtCurve& curve, double r, double tol) {
  Verdict v;
  v.r = r;
  v.d_hat = fit.d_hat;
  v.std_error = fit.std_error;
  v.d_analytic = curve.eval(r);
  v.tolerance = tol;
  const double diff = std::abs(fit.d_hat - v.d_analytic);
  v.rel_err = v.d_analytic > 0.0 ? diff / v.d_analytic : diff;
  v.pass = diff <= tol * v.d_analytic + 2.0 * fit.std_error;
  return v;
}

std::string describe(const Verdict& v) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "r=%.4g d_hat=%.4f stderr=%.4f d(r)=%.4f rel_err=%.3f tol=%.2f -> %s", v.r,
                v.d_hat, v.std_error, v.d_analytic, v.rel_err, v.tolerance,
                v.pass ? "PASS" : "FAIL");
  return buf;
}

}  // namespace dmt
