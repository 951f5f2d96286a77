#include <random>

#include "doctest.h"
#include "dmt/analytic.hpp"
#include "dmt/core.hpp"

using namespace dmt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected dmt::Error");
  return ErrorCode::InvalidArgument;
}

std::vector<std::size_t> one_based(const OrderingT& t) {
  std::vector<std::size_t> out;
  for (auto p : t.perm()) out.push_back(p + 1);
  return out;
}

Weights random_weights(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> raw(k);
  double sum = 0.0;
  for (auto& x : raw) sum += (x = u(rng));
  for (auto& x : raw) x /= sum;
  return Weights::validate(raw);
}

}  // namespace

TEST_CASE("validate_weights accepts normalized positive vectors") {
  const std::vector<double> uniform{0.5, 0.5};
  CHECK(validate_weights(uniform).values()[0] == 0.5);
  CHECK(validate_weights(uniform).values()[1] == 0.5);

  const std::vector<double> dpc{0.6, 0.4};
  const auto w = validate_weights(dpc);
  CHECK(w[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("validate_weights rejects bad input") {
  CHECK(code_of([] { validate_weights(std::vector<double>{0.7, 0.4}); }) == ErrorCode::BadSum);
  CHECK(code_of([] { validate_weights(std::vector<double>{1.0, 0.0}); }) ==
        ErrorCode::NonPositiveWeight);
  CHECK(code_of([] { validate_weights(std::vector<double>{1.2, -0.2}); }) ==
        ErrorCode::NonPositiveWeight);
  CHECK(code_of([] { validate_weights(std::vector<double>{}); }) == ErrorCode::BadSum);
  // 1e-9 is the edge of the accepted band.
  CHECK_NOTHROW(validate_weights(std::vector<double>{0.5, 0.5 + 5e-10}));
  CHECK(code_of([] { validate_weights(std::vector<double>{0.5, 0.5 + 5e-9}); }) ==
        ErrorCode::BadSum);
}

TEST_CASE("validate_weights renormalizes and is idempotent") {
  const auto w = validate_weights(std::vector<double>{0.5, 0.5 + 5e-10});
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 6;
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> raw(k);
    double sum = 0.0;
    for (auto& x : raw) sum += (x = u(rng));
    for (auto& x : raw) x /= sum;
    raw[0] += 3e-10;  // off by more than rounding, within tolerance
    const auto once = validate_weights(raw);
    const auto twice = validate_weights(once.values());
    CHECK(once == twice);
  }
}

TEST_CASE("ordering sorts by weight per antenna, stable on ties") {
  SUBCASE("mu=(1/2,1/2), n=(2,1)") {
    const auto t = ordering(validate_weights(std::vector<double>{0.5, 0.5}),
                            AntennaProfile({2, 1}));
    CHECK(one_based(t) == std::vector<std::size_t>{2, 1});
  }
  SUBCASE("mu=(2/3,1/3), n=(2,1) is a tie") {
    const auto t = ordering(validate_weights(std::vector<double>{2.0 / 3, 1.0 / 3}),
                            AntennaProfile({2, 1}));
    CHECK(one_based(t) == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("mu=(3/5,2/5), n=(3,2) is a tie despite rounding") {
    const auto t = ordering(validate_weights(std::vector<double>{0.6, 0.4}),
                            AntennaProfile({3, 2}));
    CHECK(one_based(t) == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("K=1") {
    const auto t = ordering(Weights::uniform(1), AntennaProfile({3}));
    CHECK(one_based(t) == std::vector<std::size_t>{1});
  }
  SUBCASE("dimension mismatch") {
    CHECK(code_of([] { ordering(Weights::uniform(2), AntennaProfile({1, 2, 3})); }) ==
          ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("ordering properties over random instances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ant(1, 4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + trial % 6;
    const auto w = random_weights(rng, k);
    std::vector<int> n(k);
    for (auto& x : n) x = ant(rng);
    const AntennaProfile p(n);
    const auto t = ordering(w, p);

    CHECK(t.then(t.inverse()).is_identity());
    CHECK(t.inverse().then(t).is_identity());

    std::vector<double> per(k);
    for (std::size_t i = 0; i < k; ++i) per[i] = w[i] / p[i];
    const auto sorted = t.apply(std::span<const double>(per));
    for (std::size_t j = 1; j < k; ++j) CHECK(sorted[j - 1] >= sorted[j]);
  }
}

TEST_CASE("DmtCurve evaluation") {
  const DmtCurve c({{0, 4}, {1, 2}, {2, 0}});
  CHECK(c.eval(0.5) == 3.0);
  CHECK(c.eval(0.0) == 4.0);
  CHECK(c.eval(1.0) == 2.0);
  CHECK(c.eval(2.0) == 0.0);
  CHECK(code_of([&] { c.eval(-0.01); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { c.eval(2.0000001); }) == ErrorCode::OutOfRange);

  CHECK(code_of([] { DmtCurve({{0, 4}, {0, 2}, {2, 0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { DmtCurve({{0, 4}, {1, 5}, {2, 0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { DmtCurve({{0, 4}, {2, 1}}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("DmtCurve invariants hold for generated curves") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> ant(1, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 6;
    const auto w = random_weights(rng, k);
    std::vector<int> n(k);
    for (auto& x : n) x = ant(rng);
    const AntennaProfile p(n);
    const auto curve = dmt_different(p, w);
    const auto corners = curve.corners();
    REQUIRE(corners.size() == k + 1);
    CHECK(corners.front().r == 0.0);
    CHECK(corners.back().r == static_cast<double>(k));
    CHECK(corners.front().d == p.total_diversity());
    CHECK(corners.back().d == 0.0);
    for (std::size_t i = 1; i < corners.size(); ++i) {
      CHECK(corners[i].r > corners[i - 1].r);
      CHECK(corners[i].d <= corners[i - 1].d);
    }
  }
}

TEST_CASE("Scenario construction") {
  const auto w = Weights::uniform(2);
  CHECK(Scenario::bc_zf(3, w).profile == AntennaProfile({2, 2}));
  CHECK(Scenario::bc_dpc(3, validate_weights(std::vector<double>{0.4, 0.6})).profile ==
        AntennaProfile({2, 3}));
  CHECK(code_of([] { Scenario::bc_zf(1, Weights::uniform(2)); }) == ErrorCode::TooManyUsers);
  CHECK(code_of([] { Scenario::bc_dpc(2, Weights::uniform(3)); }) == ErrorCode::TooManyUsers);
  CHECK(code_of([] { AntennaProfile({1, 0}); }) == ErrorCode::InvalidArgument);
  CHECK(parse_scenario_kind("bc-dpc") == ScenarioKind::BcDpc);
  CHECK(code_of([] { parse_scenario_kind("mimo"); }) == ErrorCode::InvalidArgument);
}
