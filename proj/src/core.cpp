#include "dmt/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dmt {

namespace {

// Indices sorted by `key` descending; keys within a relative 1e-12 of each
// other count as tied and keep ascending index order. Insertion sort keeps
// this well defined even though the tolerant comparison is not transitive.
std::vector<std::size_t> stable_descending(const std::vector<double>& key) {
  constexpr double kTieTolerance = 1e-12;
  auto greater = [&](std::size_t a, std::size_t b) {
    return key[a] - key[b] > kTieTolerance * std::max(std::abs(key[a]), std::abs(key[b]));
  };
  std::vector<std::size_t> idx;
  idx.reserve(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    auto pos = idx.end();
    while (pos != idx.begin() && greater(i, *std::prev(pos))) --pos;
    idx.insert(pos, i);
  }
  return idx;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::BadSum: return "BadSum";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooManyUsers: return "TooManyUsers";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InsufficientEvents: return "InsufficientEvents";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Weights

Weights Weights::validate(std::span<const double> raw) {
  if (raw.empty()) throw Error(ErrorCode::BadSum, "weights: empty vector");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] > 0.0) || !std::isfinite(raw[i])) {
      throw Error(ErrorCode::NonPositiveWeight,
                  "weights: entry " + std::to_string(i) + " is not strictly positive");
    }
  }
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::BadSum, "weights: sum " + std::to_string(sum) + " is not 1");
  }
  std::vector<double> mu(raw.begin(), raw.end());
  // Only rescale when the sum is off by more than accumulated rounding, so an
  // already-normalized vector is a fixed point.
  const double rounding = 4.0 * static_cast<double>(raw.size()) *
                          std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) > rounding) {
    for (double& m : mu) m /= sum;
  }
  return Weights(std::move(mu));
}

Weights Weights::uniform(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::BadSum, "weights: empty vector");
  return Weights(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

std::vector<std::size_t> Weights::descending_order() const {
  return stable_descending(mu_);
}

// ---------------------------------------------------------------------------
// AntennaProfile

AntennaProfile::AntennaProfile(std::vector<int> n) : n_(std::move(n)) {
  if (n_.empty()) throw Error(ErrorCode::InvalidArgument, "profile: empty");
  for (int v : n_) {
    if (v < 1) throw Error(ErrorCode::InvalidArgument, "profile: antenna count < 1");
  }
}

AntennaProfile AntennaProfile::uniform(std::size_t k, int n_t) {
  return AntennaProfile(std::vector<int>(k, n_t));
}

int AntennaProfile::total_diversity() const noexcept {
  return std::accumulate(n_.begin(), n_.end(), 0);
}

// ---------------------------------------------------------------------------
// OrderingT

OrderingT::OrderingT(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t p : perm_) {
    if (p >= perm_.size() || seen[p]) {
      throw Error(ErrorCode::InvalidArgument, "OrderingT: not a permutation");
    }
    seen[p] = true;
  }
}

OrderingT OrderingT::inverse() const {
  std::vector<std::size_t> inv(perm_.size());
  for (std::size_t j = 0; j < perm_.size(); ++j) inv[perm_[j]] = j;
  return OrderingT(std::move(inv));
}

OrderingT OrderingT::then(const OrderingT& next) const {
  if (next.size() != size()) {
    throw Error(ErrorCode::DimensionMismatch, "OrderingT::then: size mismatch");
  }
  // Applying *this, then next: out[j] = u[perm_[next.perm_[j]]].
  std::vector<std::size_t> out(perm_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = perm_[next.perm_[j]];
  return OrderingT(std::move(out));
}

bool OrderingT::is_identity() const {
  for (std::size_t j = 0; j < perm_.size(); ++j) {
    if (perm_[j] != j) return false;
  }
  return true;
}

OrderingT ordering(const Weights& weights, const AntennaProfile& profile) {
  if (weights.size() != profile.size()) {
    throw Error(ErrorCode::DimensionMismatch, "ordering: weights and profile differ in size");
  }
  const std::size_t k = weights.size();
  std::vector<double> per_antenna(k);
  for (std::size_t i = 0; i < k; ++i) per_antenna[i] = weights[i] / profile[i];

  return OrderingT(stable_descending(per_antenna));
}

// ---------------------------------------------------------------------------
// DmtCurve

DmtCurve::DmtCurve(std::vector<Corner> corners) : corners_(std::move(corners)) {
  if (corners_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "DmtCurve: need at least two corners");
  }
  if (corners_.front().r != 0.0 || corners_.back().d != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "DmtCurve: must start at r=0 and end at d=0");
  }
  for (std::size_t i = 1; i < corners_.size(); ++i) {
    if (!(corners_[i].r > corners_[i - 1].r) || corners_[i].d > corners_[i - 1].d) {
      throw Error(ErrorCode::InvalidArgument,
                  "DmtCurve: r must increase strictly and d must not increase");
    }
  }
}

double DmtCurve::eval(double r) const {
  if (!(r >= 0.0) || r > max_multiplexing()) {
    throw Error(ErrorCode::OutOfRange,
                "eval_dmt: r=" + std::to_string(r) + " outside [0, " +
                    std::to_string(max_multiplexing()) + "]");
  }
  auto upper = std::lower_bound(corners_.begin(), corners_.end(), r,
                                [](const Corner& c, double x) { return c.r < x; });
  if (upper->r == r) return upper->d;
  auto lower = std::prev(upper);
  const double t = (r - lower->r) / (upper->r - lower->r);
  return lower->d + t * (upper->d - lower->d);
}

// ---------------------------------------------------------------------------
// Scenario

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ParallelIdentical: return "parallel-identical";
    case ScenarioKind::ParallelDifferent: return "parallel-different";
    case ScenarioKind::BcZf: return "bc-zf";
    case ScenarioKind::BcDpc: return "bc-dpc";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (auto kind : {ScenarioKind::ParallelIdentical, ScenarioKind::ParallelDifferent,
                    ScenarioKind::BcZf, ScenarioKind::BcDpc}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + std::string(name) + "'");
}

Scenario Scenario::parallel_identical(int n_t, Weights weights) {
  if (n_t < 1) throw Error(ErrorCode::InvalidArgument, "n_t must be >= 1");
  auto profile = AntennaProfile::uniform(weights.size(), n_t);
  return Scenario{ScenarioKind::ParallelIdentical, std::move(weights), std::move(profile),
                  n_t, {}};
}

Scenario Scenario::parallel_different(AntennaProfile profile, Weights weights) {
  if (profile.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "profile and weights differ in size");
  }
  return Scenario{ScenarioKind::ParallelDifferent, std::move(weights), std::move(profile), 0,
                  {}};
}

namespace {
void check_broadcast(int m, std::size_t k) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  if (k > static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::TooManyUsers,
                "K=" + std::to_string(k) + " users exceed M=" + std::to_string(m) + " antennas");
  }
}
}  // namespace

Scenario Scenario::bc_zf(int m, Weights weights) {
  check_broadcast(m, weights.size());
  const int k = static_cast<int>(weights.size());
  auto profile = AntennaProfile::uniform(weights.size(), m - k + 1);
  return Scenario{ScenarioKind::BcZf, std::move(weights), std::move(profile), m, {}};
}

Scenario Scenario::bc_dpc(int m, Weights weights) {
  check_broadcast(m, weights.size());
  // The user encoded j-th (decreasing weight) sees M - j + 1 degrees of freedom.
  const auto order = weights.descending_order();
  std::vector<int> n(weights.size());
  for (std::size_t j = 0; j < order.size(); ++j) n[order[j]] = m - static_cast<int>(j);
  return Scenario{ScenarioKind::BcDpc, std::move(weights), AntennaProfile(std::move(n)), m,
                  {}};
}

}  // namespace dmt
