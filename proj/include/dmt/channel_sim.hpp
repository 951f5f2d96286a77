#pragma once

// Rayleigh fading Monte Carlo: channel sampling, ZF / DPC effective gains,
// finite-SNR weighted capacity and outage estimation with sharded,
// reproducible random streams.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dmt/core.hpp"

namespace dmt {

using Complex = std::complex<double>;

/// SNR carried in both units; the dB value is kept verbatim for reporting.
class Snr {
 public:
  static Snr from_db(double db);
  static Snr from_linear(double linear);

  double db() const noexcept { return db_; }
  double linear() const noexcept { return linear_; }

 private:
  Snr(double db, double linear) : db_(db), linear_(linear) {}
  double db_;
  double linear_;
};

/// Stream of CN(0,1) samples: real and imaginary parts independent N(0, 1/2).
class GaussianSource {
 public:
  /// Independent deterministic stream for shard `shard` of a run seeded
  /// with `seed`.
  GaussianSource(std::uint64_t seed, std::uint32_t shard);

  Complex complex_normal() { return {normal_(engine_), normal_(engine_)}; }
  /// |CN(0,1)|^2 summed over `dof` entries, i.e. ||h||^2 for h in C^dof.
  double squared_norm(int dof);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// K x M channel realization, row k is user k's channel h_k.
class ChannelMatrix {
 public:
  ChannelMatrix(std::size_t k, std::size_t m);
  ChannelMatrix(std::size_t k, std::size_t m, std::vector<Complex> entries);

  std::size_t users() const noexcept { return k_; }
  std::size_t antennas() const noexcept { return m_; }
  std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * m_, m_}; }
  std::span<Complex> row(std::size_t i) { return {data_.data() + i * m_, m_}; }

 private:
  std::size_t k_;
  std::size_t m_;
  std::vector<Complex> data_;
};

ChannelMatrix sample_channel(std::size_t m, std::size_t k, GaussianSource& source);

struct EffectiveGains {
  std::vector<double> gamma;  // indexed by user
};

/// Component of `h` orthogonal to span(`interferers`), via a twice-applied
/// modified Gram-Schmidt basis. Throws RankDeficient if the interferers are
/// numerically dependent.
std::vector<Complex> project_out(std::span<const std::span<const Complex>> interferers,
                                 std::span<const Complex> h);

/// gamma_i = ||g_i||^2, g_i the projection of h_i orthogonal to all other rows.
EffectiveGains zf_gains(const ChannelMatrix& h);

/// Successive encoding in `encode_order` (user indices): each user's row is
/// projected orthogonal to the rows encoded before it. Result is indexed by
/// user, not by position.
EffectiveGains dpc_gains(const ChannelMatrix& h, std::span<const std::size_t> encode_order);

/// K * sum_i mu_i log(1 + mu_i rho gamma_i), in nats.
double weighted_capacity(const EffectiveGains& gains, const Weights& weights, double rho);

/// One effective-gain draw for the scenario (parallel: ||h_k||^2 with n_k
/// entries; bc-zf: zf_gains; bc-dpc: dpc_gains in decreasing-weight order).
EffectiveGains sample_gains(const Scenario& scenario, GaussianSource& source);

struct MonteCarloConfig {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 1;
  std::uint32_t shards = 1;
};

struct OutageEstimate {
  double rho_db = 0.0;
  double rho = 0.0;
  double r = 0.0;
  std::uint64_t n_samples = 0;    // draws actually used
  std::uint64_t n_outages = 0;
  std::uint64_t n_discarded = 0;  // rank-deficient draws
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// 95% interval: normal approximation, or Clopper-Pearson when fewer than 20
/// outages (or fewer than 20 non-outages) were observed.
void fill_confidence_interval(OutageEstimate& est);

/// Outage {capacity <= r log rho} for every (r, snr) pair, evaluated on one
/// shared set of channel draws. Result order is r-major. Each entry equals
/// what outage_probability returns for that pair alone.
std::vector<OutageEstimate> outage_sweep(const Scenario& scenario, std::span<const double> rs,
                                         std::span<const Snr> snrs,
                                         const MonteCarloConfig& config);

OutageEstimate outage_probability(const Scenario& scenario, double r, Snr snr,
                                  const MonteCarloConfig& config);

struct GainReport {
  std::size_t user = 0;
  int shape = 0;  // Gamma(shape, 1) reference
  std::uint64_t n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_abs_err = 0.0;
  double var_abs_err = 0.0;
  double mean_rel_err = 0.0;
  double var_rel_err = 0.0;
  double ks = 0.0;
  double ks_critical = 0.0;  // 1% level, asymptotic
  bool pass = false;
};

struct GainTolerance {
  double mean_rel = 0.01;
  double var_rel = 0.03;
};

/// Compares the empirical distribution of user `user`'s effective gain to
/// Gamma(n_user, 1), n_user the user's diversity in the scenario's profile.
GainReport validate_gain_distribution(const Scenario& scenario, std::size_t user,
                                      std::uint64_t n_samples, std::uint64_t seed,
                                      GainTolerance tol = {});

/// Kolmogorov-Smirnov distance between `samples` and Gamma(shape, 1).
/// Sorts `samples` in place.
double ks_statistic_gamma(std::span<double> samples, double shape);

}  // namespace dmt
