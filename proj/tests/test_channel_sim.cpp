#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "dmt/channel_sim.hpp"

using namespace dmt;

namespace {

Weights w(std::initializer_list<double> v) { return validate_weights(std::vector<double>(v)); }

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return s;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// P(|h|^2 <= (rho^r - 1)/rho) for a scalar Rayleigh channel.
double scalar_outage(double rho, double r) {
  return 1.0 - std::exp(-(std::pow(rho, r) - 1.0) / rho);
}

}  // namespace

TEST_CASE("sample_channel is deterministic for a stream position") {
  GaussianSource src(1234, 0);
  GaussianSource copy = src;
  const auto a = sample_channel(4, 2, src);
  const auto b = sample_channel(4, 2, copy);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(a.row(i)[j] == b.row(i)[j]);
  }
  // Different shards give different streams.
  GaussianSource other(1234, 1);
  CHECK(sample_channel(4, 2, other).row(0)[0] != a.row(0)[0]);
}

TEST_CASE("channel entries are CN(0,1)") {
  GaussianSource src(99, 0);
  double sum = 0.0;
  const int n = 1000000;
  for (int t = 0; t < n; ++t) {
    const auto h = sample_channel(3, 1, src);
    sum += norm2(h.row(0));
  }
  CHECK(std::abs(sum / n - 3.0) <= 0.01);

  // |h_11|^2 ~ Exp(1): KS distance below the 1% critical value.
  std::vector<double> x(100000);
  for (auto& v : x) v = std::norm(sample_channel(1, 1, src).row(0)[0]);
  std::sort(x.begin(), x.end());
  double ks = 0.0;
  const double nn = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 1.0 - std::exp(-x[i]);
    ks = std::max({ks, (i + 1) / nn - f, f - i / nn});
  }
  CHECK(ks < 1.6276 / std::sqrt(nn));
}

TEST_CASE("zf_gains") {
  GaussianSource src(5, 0);
  SUBCASE("K=1 keeps the full norm") {
    const auto h = sample_channel(3, 1, src);
    CHECK(zf_gains(h).gamma[0] == doctest::Approx(norm2(h.row(0))).epsilon(1e-14));
  }
  SUBCASE("orthogonal rows are untouched") {
    ChannelMatrix h(2, 3, {Complex{1, 1}, 0, 0, 0, Complex{0, 2}, Complex{3, 0}});
    const auto g = zf_gains(h);
    CHECK(g.gamma[0] == doctest::Approx(2.0));
    CHECK(g.gamma[1] == doctest::Approx(13.0));
  }
  SUBCASE("a row parallel to its single interferer has zero gain") {
    ChannelMatrix h(2, 2, {1, 2, 2, 4});
    const auto g = zf_gains(h);
    CHECK(g.gamma[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(g.gamma[1] == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("dependent interferers are rank deficient") {
    ChannelMatrix h(3, 3, {1, 0, 0, 2, 0, 0, 0, 1, 0});
    try {
      zf_gains(h);
      FAIL("expected RankDeficient");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RankDeficient);
    }
  }
  SUBCASE("K > M is rejected") {
    CHECK_THROWS_AS(zf_gains(sample_channel(2, 3, src)), Error);
  }
}

TEST_CASE("projections are orthogonal to the removed rows") {
  GaussianSource src(77, 0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t m = 2 + t % 4;
    const std::size_t k = 1 + t % m;
    const auto h = sample_channel(m, k, src);
    const auto zf = zf_gains(h);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::span<const Complex>> others;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) others.push_back(h.row(j));
      }
      const auto g = project_out(others, h.row(i));
      const double scale = norm2(h.row(i));
      for (const auto& o : others) {
        CHECK(std::abs(inner(o, g)) <= 1e-10 * std::sqrt(norm2(o) * scale));
      }
      CHECK(zf.gamma[i] == doctest::Approx(norm2(g)).epsilon(1e-14));
      CHECK(zf.gamma[i] <= scale * (1 + 1e-12));
      CHECK(zf.gamma[i] >= 0.0);
    }

    std::vector<std::size_t> order(k);
    for (std::size_t j = 0; j < k; ++j) order[j] = k - 1 - j;
    const auto dpc = dpc_gains(h, order);
    std::vector<std::span<const Complex>> earlier;
    for (std::size_t user : order) {
      const auto f = project_out(earlier, h.row(user));
      for (const auto& o : earlier) {
        CHECK(std::abs(inner(o, f)) <= 1e-10 * std::sqrt(norm2(o) * norm2(h.row(user))));
      }
      CHECK(dpc.gamma[user] == doctest::Approx(norm2(f)).epsilon(1e-14));
      earlier.push_back(h.row(user));
    }
    CHECK(dpc.gamma[order[0]] == doctest::Approx(norm2(h.row(order[0]))).epsilon(1e-14));
  }
}

TEST_CASE("dpc_gains") {
  SUBCASE("K=M orthogonal rows") {
    ChannelMatrix h(2, 2, {Complex{0, 3}, 0, 0, Complex{1, -1}});
    const std::size_t order[] = {1, 0};
    const auto g = dpc_gains(h, order);
    CHECK(g.gamma[0] == doctest::Approx(9.0));
    CHECK(g.gamma[1] == doctest::Approx(2.0));
  }
  SUBCASE("bad order") {
    ChannelMatrix h(2, 2, {1, 0, 0, 1});
    const std::size_t dup[] = {0, 0};
    CHECK_THROWS_AS(dpc_gains(h, dup), Error);
    const std::size_t short_order[] = {0};
    CHECK_THROWS_AS(dpc_gains(h, short_order), Error);
  }
}

TEST_CASE("effective gain means for M=3, K=2") {
  GaussianSource src(2024, 0);
  const int n = 1000000;
  double zf0 = 0, zf1 = 0, dpc0 = 0, dpc1 = 0;
  const std::size_t order[] = {0, 1};
  for (int t = 0; t < n; ++t) {
    const auto h = sample_channel(3, 2, src);
    const auto z = zf_gains(h);
    const auto d = dpc_gains(h, order);
    zf0 += z.gamma[0];
    zf1 += z.gamma[1];
    dpc0 += d.gamma[0];
    dpc1 += d.gamma[1];
  }
  // Gamma(M-K+1, 1) = Gamma(2, 1) for ZF; Gamma(3, 1), Gamma(2, 1) for DPC.
  CHECK(std::abs(zf0 / n - 2.0) <= 0.01);
  CHECK(std::abs(zf1 / n - 2.0) <= 0.01);
  CHECK(std::abs(dpc0 / n - 3.0) <= 0.015);
  CHECK(std::abs(dpc1 / n - 2.0) <= 0.01);
}

TEST_CASE("weighted_capacity") {
  CHECK(weighted_capacity({{1.0}}, w({1.0}), std::exp(1.0) - 1.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weighted_capacity({{0.0, 0.0}}, w({0.5, 0.5}), 10.0) == 0.0);
  CHECK(weighted_capacity({{1.0, 1.0}}, w({0.5, 0.5}), 10.0) ==
        doctest::Approx(2.0 * std::log(6.0)).epsilon(1e-15));
  // Independent scalar evaluation.
  const double expected = 3.0 * (0.2 * std::log(1 + 0.2 * 7 * 0.5) +
                                 0.3 * std::log(1 + 0.3 * 7 * 2.0) +
                                 0.5 * std::log(1 + 0.5 * 7 * 1.5));
  CHECK(weighted_capacity({{0.5, 2.0, 1.5}}, w({0.2, 0.3, 0.5}), 7.0) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_capacity({{1.0}}, w({0.5, 0.5}), 1.0), Error);
}

TEST_CASE("confidence intervals") {
  OutageEstimate e;
  e.n_samples = 1000;
  e.n_outages = 0;
  fill_confidence_interval(e);
  CHECK(e.p_hat == 0.0);
  CHECK(e.ci_low == 0.0);
  CHECK(e.ci_high == doctest::Approx(1.0 - std::pow(0.025, 1.0 / 1000)).epsilon(1e-9));

  e.n_outages = 1000;
  fill_confidence_interval(e);
  CHECK(e.ci_high == 1.0);
  CHECK(e.ci_low == doctest::Approx(std::pow(0.025, 1.0 / 1000)).epsilon(1e-9));

  e.n_outages = 250;
  fill_confidence_interval(e);
  const double half = 1.959963984540054 * std::sqrt(0.25 * 0.75 / 1000);
  CHECK(e.ci_low == doctest::Approx(0.25 - half));
  CHECK(e.ci_high == doctest::Approx(0.25 + half));

  for (std::uint64_t k = 0; k <= 60; ++k) {
    e.n_outages = k;
    fill_confidence_interval(e);
    CHECK(e.ci_low <= e.p_hat);
    CHECK(e.p_hat <= e.ci_high);
    CHECK(e.ci_low >= 0.0);
    CHECK(e.ci_high <= 1.0);
  }
}

TEST_CASE("outage_probability") {
  const auto scalar = Scenario::parallel_identical(1, w({1.0}));
  MonteCarloConfig mc{200000, 7, 4};

  SUBCASE("scalar channel matches the exponential CDF") {
    const auto est = outage_probability(scalar, 0.5, Snr::from_linear(10.0), mc);
    const double truth = scalar_outage(10.0, 0.5);
    CHECK(truth == doctest::Approx(0.1945).epsilon(1e-3));
    CHECK(est.ci_low <= truth);
    CHECK(truth <= est.ci_high);
  }
  SUBCASE("r = 0 never outages") {
    const auto sc = Scenario::bc_dpc(3, w({0.6, 0.4}));
    const auto est = outage_probability(sc, 0.0, Snr::from_db(40), {100000, 3, 2});
    CHECK(est.n_outages == 0);
    CHECK(est.p_hat == 0.0);
  }
  SUBCASE("deterministic for fixed seed and shards") {
    const auto a = outage_probability(scalar, 0.75, Snr::from_db(20), mc);
    const auto b = outage_probability(scalar, 0.75, Snr::from_db(20), mc);
    CHECK(a.n_outages == b.n_outages);
    CHECK(a.n_samples == mc.n_samples);
    CHECK(a.ci_low == b.ci_low);
  }
  SUBCASE("r outside [0, K]") {
    CHECK_THROWS_AS(outage_probability(scalar, 1.5, Snr::from_db(10), mc), Error);
    CHECK_THROWS_AS(outage_probability(scalar, -0.5, Snr::from_db(10), mc), Error);
  }
}

TEST_CASE("outage_sweep equals pointwise evaluation and is monotone") {
  const auto sc = Scenario::bc_zf(3, w({0.6, 0.4}));
  const double rs[] = {0.25, 0.75, 1.5};
  std::vector<Snr> snrs;
  // Outage only falls with SNR once the threshold r log(rho) dominates.
  for (double db = 10; db <= 30; db += 5) snrs.push_back(Snr::from_db(db));
  const MonteCarloConfig mc{40000, 11, 3};
  const auto sweep = outage_sweep(sc, rs, snrs, mc);
  REQUIRE(sweep.size() == 3 * snrs.size());

  const auto single = outage_probability(sc, rs[1], snrs[2], mc);
  CHECK(single.n_outages == sweep[1 * snrs.size() + 2].n_outages);

  for (std::size_t s = 0; s < snrs.size(); ++s) {
    // Same draws, larger threshold: exactly non-decreasing in r.
    CHECK(sweep[s].n_outages <= sweep[snrs.size() + s].n_outages);
    CHECK(sweep[snrs.size() + s].n_outages <= sweep[2 * snrs.size() + s].n_outages);
  }
  for (std::size_t ri = 0; ri < 3; ++ri) {
    for (std::size_t s = 1; s < snrs.size(); ++s) {
      const auto& lo = sweep[ri * snrs.size() + s - 1];
      const auto& hi = sweep[ri * snrs.size() + s];
      CHECK(hi.ci_low <= lo.ci_high);
    }
  }
}

TEST_CASE("scalar outage agrees with the closed form across (rho, r)") {
  const auto scalar = Scenario::parallel_identical(1, w({1.0}));
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> db(0.0, 30.0), rr(0.1, 0.9);
  int covered = 0;
  for (int point = 0; point < 100; ++point) {
    const double rho_db = db(rng), r = rr(rng);
    const auto est = outage_probability(scalar, r, Snr::from_db(rho_db),
                                        {20000, 1000 + static_cast<std::uint64_t>(point), 1});
    const double truth = scalar_outage(Snr::from_db(rho_db).linear(), r);
    if (est.ci_low <= truth && truth <= est.ci_high) ++covered;
  }
  MESSAGE("closed form inside the 95% interval at " << covered << "/100 points");
  CHECK(covered >= 93);
}

TEST_CASE("validate_gain_distribution") {
  SUBCASE("bc-zf M=3 K=2") {
    const auto sc = Scenario::bc_zf(3, w({0.5, 0.5}));
    const auto rep = validate_gain_distribution(sc, 0, 1000000, 3);
    CHECK(rep.shape == 2);
    CHECK(rep.mean_rel_err <= 0.01);
    CHECK(rep.var_rel_err <= 0.03);
    CHECK(rep.pass);
  }
  SUBCASE("bc-dpc M=3 first user") {
    const auto sc = Scenario::bc_dpc(3, w({0.5, 0.5}));
    const auto rep = validate_gain_distribution(sc, 0, 1000000, 4);
    CHECK(rep.shape == 3);
    CHECK(std::abs(rep.mean - 3.0) <= 0.03);
    CHECK(rep.pass);
  }
  SUBCASE("parallel-identical n_t=1 is Exp(1)") {
    const auto sc = Scenario::parallel_identical(1, w({0.3, 0.7}));
    const auto rep = validate_gain_distribution(sc, 1, 200000, 5);
    CHECK(rep.shape == 1);
    CHECK(rep.pass);
  }
  SUBCASE("wrong reference shape is detected") {
    // Gamma(3,1) samples (first DPC user) against a Gamma(2,1) reference.
    GaussianSource src(9, 0);
    std::vector<double> x(20000);
    for (auto& v : x) v = src.squared_norm(3);
    CHECK(ks_statistic_gamma(x, 2.0) > 1.6276 / std::sqrt(20000.0));
    CHECK(ks_statistic_gamma(x, 3.0) < 1.6276 / std::sqrt(20000.0));
  }
  SUBCASE("user index out of range") {
    CHECK_THROWS_AS(validate_gain_distribution(Scenario::bc_zf(3, w({0.5, 0.5})), 2, 100, 1),
                    Error);
  }
}
