#pragma once

// Command-line front end: `curve`, `simulate`, `fit`, `validate`.
// Exit codes: 0 success, 2 invalid input, 3 statistical/acceptance failure.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dmt/channel_sim.hpp"
#include "dmt/core.hpp"

namespace dmt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitFailed = 3;

inline constexpr std::string_view kSimulateHeader =
    "scenario,K,M,weights,r,rho_db,n_samples,n_outages,p_hat,ci_low,ci_high,seed,shards";

/// Comma-separated decimals or fractions ("3/5"), each converted with a single
/// rounding from its exact rational value.
std::vector<double> parse_number_list(std::string_view text);

/// Inclusive "start:stop:step" grid in dB.
std::vector<Snr> parse_snr_grid(std::string_view text);

/// "min:max" in dB.
std::pair<double, double> parse_window(std::string_view text);

/// Parses `key = value` lines; blank lines and '#' comments (to end of line) are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

/// One row of a simulate table.
struct SimulationRow {
  std::string scenario;
  std::size_t k = 0;
  int m = 0;
  std::vector<double> weights;
  OutageEstimate estimate;
  std::uint64_t seed = 0;
  std::uint32_t shards = 0;
};

std::string format_rows_csv(const std::vector<SimulationRow>& rows);
std::string format_rows_json(const std::vector<SimulationRow>& rows);
/// Accepts either format (JSON is detected by a leading '[').
/// Throws dmt::Error(InvalidArgument) on schema mismatch or empty input.
std::vector<SimulationRow> parse_rows(std::string_view text);

/// Runs one command line (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dmt::cli
