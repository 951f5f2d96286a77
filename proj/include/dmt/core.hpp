#pragma once

// Domain types shared by the analytic, oracle and simulation layers:
// user/channel weights, antenna profiles, the weight-per-antenna ordering,
// piecewise-linear tradeoff curves and scenario descriptions.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dmt {

enum class ErrorCode {
  NonPositiveWeight,
  BadSum,
  DimensionMismatch,
  TooManyUsers,
  OutOfRange,
  TooLarge,
  RankDeficient,
  InsufficientData,
  InsufficientEvents,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Base exception for all library errors. `code()` identifies the failure
/// class so callers (and the CLI) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Normalized positive weights, sum 1.
class Weights {
 public:
  /// Accepts entries that are all > 0 and sum to 1 within kSumTolerance,
  /// then renormalizes.
  static Weights validate(std::span<const double> raw);
  static Weights uniform(std::size_t k);

  static constexpr double kSumTolerance = 1e-9;

  std::size_t size() const noexcept { return mu_.size(); }
  double operator[](std::size_t i) const { return mu_[i]; }
  std::span<const double> values() const noexcept { return mu_; }

  /// Indices ordered by decreasing weight, ties by ascending index.
  std::vector<std::size_t> descending_order() const;

  friend bool operator==(const Weights&, const Weights&) = default;

 private:
  explicit Weights(std::vector<double> mu) : mu_(std::move(mu)) {}
  std::vector<double> mu_;
};

inline Weights validate_weights(std::span<const double> raw) {
  return Weights::validate(raw);
}

/// Antenna count per parallel channel.
class AntennaProfile {
 public:
  explicit AntennaProfile(std::vector<int> n);
  static AntennaProfile uniform(std::size_t k, int n_t);

  std::size_t size() const noexcept { return n_.size(); }
  int operator[](std::size_t i) const { return n_[i]; }
  std::span<const int> counts() const noexcept { return n_; }
  int total_diversity() const noexcept;

  friend bool operator==(const AntennaProfile&, const AntennaProfile&) = default;

 private:
  std::vector<int> n_;
};

/// The transform T: a permutation sorting channels by mu_i / n_i descending.
/// `perm()[j]` is the original (0-based) index placed at sorted position j.
class OrderingT {
 public:
  explicit OrderingT(std::vector<std::size_t> perm);

  std::span<const std::size_t> perm() const noexcept { return perm_; }
  std::size_t size() const noexcept { return perm_.size(); }
  OrderingT inverse() const;
  OrderingT then(const OrderingT& next) const;
  bool is_identity() const;

  /// Returns (u[perm[0]], ..., u[perm[K-1]]).
  template <typename T>
  std::vector<T> apply(std::span<const T> u) const {
    if (u.size() != perm_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "OrderingT::apply: size mismatch");
    }
    std::vector<T> out;
    out.reserve(u.size());
    for (std::size_t idx : perm_) out.push_back(u[idx]);
    return out;
  }

 private:
  std::vector<std::size_t> perm_;
};

OrderingT ordering(const Weights& weights, const AntennaProfile& profile);

struct Corner {
  double r = 0.0;  // multiplexing gain
  double d = 0.0;  // diversity gain
  friend bool operator==(const Corner&, const Corner&) = default;
};

/// Piecewise-linear tradeoff through ordered corner points. Collinear
/// corners are kept.
class DmtCurve {
 public:
  explicit DmtCurve(std::vector<Corner> corners);

  std::span<const Corner> corners() const noexcept { return corners_; }
  double max_multiplexing() const noexcept { return corners_.back().r; }
  double max_diversity() const noexcept { return corners_.front().d; }

  /// Linear interpolation; exact corner ordinate at a corner abscissa.
  /// Throws OutOfRange outside [0, max_multiplexing()].
  double eval(double r) const;

 private:
  std::vector<Corner> corners_;
};

inline double eval_dmt(const DmtCurve& curve, double r) { return curve.eval(r); }

enum class ScenarioKind { ParallelIdentical, ParallelDifferent, BcZf, BcDpc };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view name);

/// One configuration: either K parallel MISO channels or a K-user MISO
/// broadcast channel with M transmit antennas.
struct Scenario {
  ScenarioKind kind;
  Weights weights;
  AntennaProfile profile;  // per-user diversity of the parallel equivalent
  int m = 0;               // transmit antennas (bc-*), n_t (identical), 0 otherwise
  std::string notes;

  static Scenario parallel_identical(int n_t, Weights weights);
  static Scenario parallel_different(AntennaProfile profile, Weights weights);
  static Scenario bc_zf(int m, Weights weights);
  static Scenario bc_dpc(int m, Weights weights);

  std::size_t users() const noexcept { return weights.size(); }
};

}  // namespace dmt
