#include "dmt/channel_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace dmt {

// ---------------------------------------------------------------------------
// SNR and random streams

Snr Snr::from_db(double db) { return Snr(db, std::pow(10.0, db / 10.0)); }

Snr Snr::from_linear(double linear) {
  if (!(linear > 0.0)) throw Error(ErrorCode::InvalidArgument, "SNR must be positive");
  return Snr(10.0 * std::log10(linear), linear);
}

GaussianSource::GaussianSource(std::uint64_t seed, std::uint32_t shard)
    : normal_(0.0, std::sqrt(0.5)) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), shard, 0x9e3779b9u};
  engine_.seed(seq);
}

double GaussianSource::squared_norm(int dof) {
  double sum = 0.0;
  for (int i = 0; i < dof; ++i) sum += std::norm(complex_normal());
  return sum;
}

// ---------------------------------------------------------------------------
// Channel matrix

ChannelMatrix::ChannelMatrix(std::size_t k, std::size_t m)
    : k_(k), m_(m), data_(k * m) {}

ChannelMatrix::ChannelMatrix(std::size_t k, std::size_t m, std::vector<Complex> entries)
    : k_(k), m_(m), data_(std::move(entries)) {
  if (data_.size() != k * m) {
    throw Error(ErrorCode::DimensionMismatch, "ChannelMatrix: entry count != K*M");
  }
}

ChannelMatrix sample_channel(std::size_t m, std::size_t k, GaussianSource& source) {
  if (m < 1 || k < 1) throw Error(ErrorCode::InvalidArgument, "sample_channel: M, K >= 1");
  ChannelMatrix h(k, m);
  for (std::size_t i = 0; i < k; ++i) {
    for (Complex& z : h.row(i)) z = source.complex_normal();
  }
  return h;
}

// ---------------------------------------------------------------------------
// Projections

namespace {

double squared_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return s;
}

// w -= q (q^H w), for every q in the orthonormal basis, applied twice.
void orthogonalize(const std::vector<std::vector<Complex>>& basis, std::vector<Complex>& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      Complex c{0.0, 0.0};
      for (std::size_t j = 0; j < w.size(); ++j) c += std::conj(q[j]) * w[j];
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= c * q[j];
    }
  }
}

constexpr double kRankTolerance = 1e-10;

}  // namespace

std::vector<Complex> project_out(std::span<const std::span<const Complex>> interferers,
                                 std::span<const Complex> h) {
  std::vector<std::vector<Complex>> basis;
  basis.reserve(interferers.size());
  for (const auto& v : interferers) {
    if (v.size() != h.size()) {
      throw Error(ErrorCode::DimensionMismatch, "project_out: row length mismatch");
    }
    std::vector<Complex> w(v.begin(), v.end());
    const double before = std::sqrt(squared_norm(w));
    orthogonalize(basis, w);
    const double after = std::sqrt(squared_norm(w));
    if (!(after > kRankTolerance * before) || before == 0.0) {
      throw Error(ErrorCode::RankDeficient, "project_out: interfering rows are dependent");
    }
    for (Complex& z : w) z /= after;
    basis.push_back(std::move(w));
  }
  std::vector<Complex> out(h.begin(), h.end());
  orthogonalize(basis, out);
  return out;
}

EffectiveGains zf_gains(const ChannelMatrix& h) {
  const std::size_t k = h.users();
  if (k > h.antennas()) throw Error(ErrorCode::TooManyUsers, "zf_gains: K > M");
  EffectiveGains g;
  g.gamma.resize(k);
  std::vector<std::span<const Complex>> others;
  for (std::size_t i = 0; i < k; ++i) {
    others.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) others.push_back(h.row(j));
    }
    g.gamma[i] = squared_norm(project_out(others, h.row(i)));
  }
  return g;
}

EffectiveGains dpc_gains(const ChannelMatrix& h, std::span<const std::size_t> encode_order) {
  const std::size_t k = h.users();
  if (k > h.antennas()) throw Error(ErrorCode::TooManyUsers, "dpc_gains: K > M");
  OrderingT check(std::vector<std::size_t>(encode_order.begin(), encode_order.end()));
  if (check.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "dpc_gains: order length != K");
  }
  EffectiveGains g;
  g.gamma.resize(k);
  std::vector<std::span<const Complex>> earlier;
  for (std::size_t user : encode_order) {
    g.gamma[user] = squared_norm(project_out(earlier, h.row(user)));
    earlier.push_back(h.row(user));
  }
  return g;
}

double weighted_capacity(const EffectiveGains& gains, const Weights& weights, double rho) {
  if (gains.gamma.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "weighted_capacity: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sum += weights[i] * std::log1p(weights[i] * rho * gains.gamma[i]);
  }
  return static_cast<double>(weights.size()) * sum;
}

EffectiveGains sample_gains(const Scenario& scenario, GaussianSource& source) {
  const std::size_t k = scenario.users();
  switch (scenario.kind) {
    case ScenarioKind::ParallelIdentical:
    case ScenarioKind::ParallelDifferent: {
      EffectiveGains g;
      g.gamma.resize(k);
      for (std::size_t i = 0; i < k; ++i) g.gamma[i] = source.squared_norm(scenario.profile[i]);
      return g;
    }
    case ScenarioKind::BcZf:
      return zf_gains(sample_channel(scenario.m, k, source));
    case ScenarioKind::BcDpc: {
      const auto order = scenario.weights.descending_order();
      return dpc_gains(sample_channel(scenario.m, k, source), order);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "sample_gains: unknown scenario kind");
}

// ---------------------------------------------------------------------------
// Outage estimation

void fill_confidence_interval(OutageEstimate& est) {
  if (est.n_samples == 0) {
    est.p_hat = 0.0;
    est.ci_low = 0.0;
    est.ci_high = 1.0;
    return;
  }
  const double n = static_cast<double>(est.n_samples);
  const double k = static_cast<double>(est.n_outages);
  est.p_hat = k / n;
  if (est.n_outages >= 20 && est.n_samples - est.n_outages >= 20) {
    const double half = 1.959963984540054 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
    est.ci_low = std::max(0.0, est.p_hat - half);
    est.ci_high = std::min(1.0, est.p_hat + half);
  } else {
    using boost::math::binomial_distribution;
    est.ci_low = binomial_distribution<>::find_lower_bound_on_p(
        n, k, 0.025, binomial_distribution<>::clopper_pearson_exact_interval);
    est.ci_high = binomial_distribution<>::find_upper_bound_on_p(
        n, k, 0.025, binomial_distribution<>::clopper_pearson_exact_interval);
  }
}

namespace {

struct ShardCounts {
  std::vector<std::uint64_t> outages;  // r-major, one per (r, snr)
  std::uint64_t used = 0;
  std::uint64_t discarded = 0;
};

ShardCounts run_shard(const Scenario& scenario, std::span<const double> thresholds_r,
                      std::span<const Snr> snrs, std::uint64_t n, std::uint64_t seed,
                      std::uint32_t shard) {
  GaussianSource source(seed, shard);
  ShardCounts counts;
  counts.outages.assign(thresholds_r.size() * snrs.size(), 0);
  std::vector<double> log_rho(snrs.size());
  for (std::size_t s = 0; s < snrs.size(); ++s) log_rho[s] = std::log(snrs[s].linear());

  for (std::uint64_t i = 0; i < n; ++i) {
    EffectiveGains gains;
    try {
      gains = sample_gains(scenario, source);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      ++counts.discarded;
      continue;
    }
    ++counts.used;
    for (std::size_t s = 0; s < snrs.size(); ++s) {
      const double cap = weighted_capacity(gains, scenario.weights, snrs[s].linear());
      for (std::size_t ri = 0; ri < thresholds_r.size(); ++ri) {
        if (cap <= thresholds_r[ri] * log_rho[s]) ++counts.outages[ri * snrs.size() + s];
      }
    }
  }
  return counts;
}

}  // namespace

std::vector<OutageEstimate> outage_sweep(const Scenario& scenario, std::span<const double> rs,
                                         std::span<const Snr> snrs,
                                         const MonteCarloConfig& config) {
  const double k = static_cast<double>(scenario.users());
  for (double r : rs) {
    if (!(r >= 0.0) || r > k) {
      throw Error(ErrorCode::OutOfRange, "outage: r=" + std::to_string(r) + " outside [0, K]");
    }
  }
  if (config.n_samples < 1) throw Error(ErrorCode::InvalidArgument, "outage: n_samples < 1");
  if (config.shards < 1) throw Error(ErrorCode::InvalidArgument, "outage: shards < 1");

  const std::uint32_t shards = config.shards;
  std::vector<ShardCounts> results(shards);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (std::uint32_t s = next++; s < shards; s = next++) {
      const std::uint64_t n =
          config.n_samples / shards + (s < config.n_samples % shards ? 1 : 0);
      results[s] = run_shard(scenario, rs, snrs, n, config.seed, s);
    }
  };
  const unsigned threads =
      std::min<unsigned>(shards, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<OutageEstimate> out;
  out.reserve(rs.size() * snrs.size());
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    for (std::size_t s = 0; s < snrs.size(); ++s) {
      OutageEstimate est;
      est.rho_db = snrs[s].db();
      est.rho = snrs[s].linear();
      est.r = rs[ri];
      for (const auto& c : results) {
        est.n_samples += c.used;
        est.n_discarded += c.discarded;
        est.n_outages += c.outages[ri * snrs.size() + s];
      }
      fill_confidence_interval(est);
      out.push_back(est);
    }
  }
  return out;
}

OutageEstimate outage_probability(const Scenario& scenario, double r, Snr snr,
                                  const MonteCarloConfig& config) {
  const double rs[] = {r};
  const Snr snrs[] = {snr};
  return outage_sweep(scenario, rs, snrs, config).front();
}

// ---------------------------------------------------------------------------
// Gain distribution checks

double ks_statistic_gamma(std::span<double> samples, double shape) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = samples[i] <= 0.0 ? 0.0 : boost::math::gamma_p(shape, samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

GainReport validate_gain_distribution(const Scenario& scenario, std::size_t user,
                                      std::uint64_t n_samples, std::uint64_t seed,
                                      GainTolerance tol) {
  if (user >= scenario.users()) {
    throw Error(ErrorCode::OutOfRange, "validate_gain_distribution: user index out of range");
  }
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");

  GaussianSource source(seed, 0);
  std::vector<double> samples;
  samples.reserve(n_samples);
  while (samples.size() < n_samples) {
    try {
      samples.push_back(sample_gains(scenario, source).gamma[user]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
    }
  }

  GainReport rep;
  rep.user = user;
  rep.shape = scenario.profile[user];
  rep.n_samples = n_samples;
  const double n = static_cast<double>(n_samples);
  rep.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - rep.mean) * (x - rep.mean);
  rep.variance = ss / (n - 1.0);

  // Gamma(k, 1): mean k, variance k.
  const double k = rep.shape;
  rep.mean_abs_err = std::abs(rep.mean - k);
  rep.var_abs_err = std::abs(rep.variance - k);
  rep.mean_rel_err = rep.mean_abs_err / k;
  rep.var_rel_err = rep.var_abs_err / k;
  rep.ks = ks_statistic_gamma(samples, k);
  rep.ks_critical = 1.6276 / std::sqrt(n);
  rep.pass = rep.mean_rel_err <= tol.mean_rel && rep.var_rel_err <= tol.var_rel &&
             rep.ks <= rep.ks_critical;
  return rep;
}

}  // namespace dmt
