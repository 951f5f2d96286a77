#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmt/analytic.hpp"
#include "dmt/exponent_fit.hpp"

namespace dmt::cli {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Error invalid(const std::string& what) { return Error(ErrorCode::InvalidArgument, what); }

// Exact rational num/den for a decimal literal such as "-0.125" or "3".
struct Rational {
  __int128 num = 0;
  __int128 den = 1;
};

Rational parse_decimal(std::string_view s) {
  s = trim(s);
  Rational q;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  bool seen_digit = false, seen_point = false;
  int digits = 0;
  for (char c : s) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      if (++digits > 30) throw invalid("number has too many digits: " + std::string(s));
      q.num = q.num * 10 + (c - '0');
      if (seen_point) q.den *= 10;
      seen_digit = true;
    } else {
      throw invalid("not a number: '" + std::string(s) + "'");
    }
  }
  if (!seen_digit) throw invalid("not a number: '" + std::string(s) + "'");
  if (negative) q.num = -q.num;
  return q;
}

double to_double(Rational q) {
  if (q.den < 0) {
    q.den = -q.den;
    q.num = -q.num;
  }
  if (q.den == 0) throw invalid("division by zero in fraction");
  auto abs128 = [](__int128 v) { return v < 0 ? -v : v; };
  __int128 a = abs128(q.num), b = q.den;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    q.num /= a;
    q.den /= a;
  }
  return static_cast<double>(static_cast<long double>(q.num) / static_cast<long double>(q.den));
}

double parse_number(std::string_view token) {
  token = trim(token);
  const auto slash = token.find('/');
  if (slash == std::string_view::npos) return to_double(parse_decimal(token));
  const Rational a = parse_decimal(token.substr(0, slash));
  const Rational b = parse_decimal(token.substr(slash + 1));
  return to_double(Rational{a.num * b.den, a.den * b.num});
}

double parse_plain_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw invalid("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw invalid("not a count: '" + std::string(s) + "'");
  }
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_weights(const std::vector<double>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ';';
    s += fmt17(w[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string scenario;
  int m = 0;
  int k = 0;
  int nt = 0;
  std::string profile;
  std::string weights;
  std::string r_list;
  std::string snr_db;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::uint32_t shards = 1;
  std::string out;
  std::string format = "csv";
  std::string config;
  // fit
  std::string input;
  std::string window;
  double tol = kDefaultSlopeTolerance;
};

void add_common_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--scenario", c.scenario,
                  "parallel-identical | parallel-different | bc-zf | bc-dpc");
  cmd->add_option("--m", c.m, "transmit antennas (broadcast scenarios)");
  cmd->add_option("--k", c.k, "number of users / channels (checked against --weights)");
  cmd->add_option("--nt", c.nt, "antennas per channel (parallel-identical)");
  cmd->add_option("--profile", c.profile, "antenna counts, e.g. 2,1 (parallel-different)");
  cmd->add_option("--weights", c.weights, "weights, decimals or fractions, e.g. 3/5,2/5");
  cmd->add_option("--r", c.r_list, "multiplexing gains, comma separated");
  cmd->add_option("--snr-db", c.snr_db, "SNR grid start:stop:step in dB");
  cmd->add_option("--samples", c.samples, "Monte Carlo samples per point");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--shards", c.shards, "number of independent random streams");
  cmd->add_option("--out", c.out, "output path (default: standard output)");
  cmd->add_option("--format", c.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--config", c.config, "key = value file; command-line flags take precedence");
}

void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  for (const auto& [key, value] : parse_config_text(ss.str())) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) throw invalid("unknown config key '" + key + "'");
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

Scenario build_scenario(const RunConfig& c) {
  if (c.scenario.empty()) throw invalid("--scenario is required");
  if (c.weights.empty()) throw invalid("--weights is required");
  const ScenarioKind kind = parse_scenario_kind(c.scenario);
  Weights w = validate_weights(parse_number_list(c.weights));
  if (c.k != 0 && static_cast<std::size_t>(c.k) != w.size()) {
    throw Error(ErrorCode::DimensionMismatch, "--k=" + std::to_string(c.k) + " but " +
                                                  std::to_string(w.size()) + " weights given");
  }
  switch (kind) {
    case ScenarioKind::ParallelIdentical:
      if (c.nt < 1) throw invalid("--nt >= 1 is required for parallel-identical");
      return Scenario::parallel_identical(c.nt, std::move(w));
    case ScenarioKind::ParallelDifferent: {
      if (c.profile.empty()) throw invalid("--profile is required for parallel-different");
      std::vector<int> n;
      for (auto tok : split(c.profile, ',')) {
        const auto v = parse_count(tok);
        if (v < 1 || v > 1024) throw invalid("antenna counts must be in [1, 1024]");
        n.push_back(static_cast<int>(v));
      }
      return Scenario::parallel_different(AntennaProfile(std::move(n)), std::move(w));
    }
    case ScenarioKind::BcZf:
    case ScenarioKind::BcDpc:
      if (c.m < 1) throw invalid("--m >= 1 is required for broadcast scenarios");
      return kind == ScenarioKind::BcZf ? Scenario::bc_zf(c.m, std::move(w))
                                        : Scenario::bc_dpc(c.m, std::move(w));
  }
  throw invalid("unknown scenario");
}

bool has_scenario_flags(const RunConfig& c) { return !c.scenario.empty(); }

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw invalid("cannot write '" + c.out + "'");
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_curve(const RunConfig& c, std::ostream& out) {
  const Scenario sc = build_scenario(c);
  const DmtCurve curve = dmt_for(sc);
  const double kmax = curve.max_multiplexing();
  const int steps = static_cast<int>(std::lround(kmax / 0.01));

  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= steps; ++i) {
    const double r = (i == steps) ? kmax : i / 100.0;
    samples.emplace_back(r, curve.eval(r));
  }

  std::string text;
  if (c.format == "json") {
    json j;
    j["scenario"] = std::string(to_string(sc.kind));
    j["K"] = sc.users();
    j["M"] = sc.m;
    j["profile"] = std::vector<int>(sc.profile.counts().begin(), sc.profile.counts().end());
    j["weights"] = std::vector<double>(sc.weights.values().begin(), sc.weights.values().end());
    j["corners"] = json::array();
    for (const Corner& p : curve.corners()) j["corners"].push_back({{"r", p.r}, {"d", p.d}});
    j["samples"] = json::array();
    for (auto [r, d] : samples) j["samples"].push_back({{"r", r}, {"d", d}});
    text = j.dump(2) + "\n";
  } else {
    text = "kind,r,d\n";
    for (const Corner& p : curve.corners()) {
      text += "corner," + fmt17(p.r) + "," + fmt17(p.d) + "\n";
    }
    for (auto [r, d] : samples) text += "sample," + fmt17(r) + "," + fmt17(d) + "\n";
  }
  emit(c, text, out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const Scenario sc = build_scenario(c);
  if (c.r_list.empty()) throw invalid("--r is required");
  if (c.snr_db.empty()) throw invalid("--snr-db is required");
  const auto rs = parse_number_list(c.r_list);
  const auto snrs = parse_snr_grid(c.snr_db);

  MonteCarloConfig mc;
  mc.n_samples = c.samples == 0 ? 100000 : c.samples;
  mc.seed = c.seed;
  mc.shards = c.shards;
  const auto estimates = outage_sweep(sc, rs, snrs, mc);

  std::vector<SimulationRow> rows;
  for (const auto& e : estimates) {
    SimulationRow row;
    row.scenario = std::string(to_string(sc.kind));
    row.k = sc.users();
    row.m = sc.m;
    row.weights.assign(sc.weights.values().begin(), sc.weights.values().end());
    row.estimate = e;
    row.seed = mc.seed;
    row.shards = mc.shards;
    rows.push_back(std::move(row));
  }
  emit(c, c.format == "json" ? format_rows_json(rows) : format_rows_csv(rows), out);
  return kExitOk;
}

Scenario scenario_from_rows(const std::vector<SimulationRow>& rows, const RunConfig& c) {
  const auto& first = rows.front();
  for (const auto& row : rows) {
    if (row.scenario != first.scenario || row.k != first.k || row.m != first.m ||
        row.weights != first.weights) {
      throw invalid("input mixes several scenarios; pass the reference with --scenario");
    }
  }
  if (has_scenario_flags(c)) return build_scenario(c);

  Weights w = validate_weights(first.weights);
  switch (parse_scenario_kind(first.scenario)) {
    case ScenarioKind::ParallelIdentical:
      return Scenario::parallel_identical(first.m, std::move(w));
    case ScenarioKind::ParallelDifferent:
      throw invalid("parallel-different input needs --scenario/--profile/--weights");
    case ScenarioKind::BcZf:
      return Scenario::bc_zf(first.m, std::move(w));
    case ScenarioKind::BcDpc:
      return Scenario::bc_dpc(first.m, std::move(w));
  }
  throw invalid("unknown scenario");
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw invalid("an input file is required (--in)");
  const auto rows = parse_rows(read_file(c.input));
  const Scenario sc = scenario_from_rows(rows, c);
  const DmtCurve curve = dmt_for(sc);

  SnrWindow window{-1e300, 1e300};
  if (!c.window.empty()) {
    const auto [lo, hi] = parse_window(c.window);
    window = {lo, hi};
  }

  std::vector<double> r_order;
  std::map<double, std::vector<OutageEstimate>> by_r;
  for (const auto& row : rows) {
    if (!by_r.contains(row.estimate.r)) r_order.push_back(row.estimate.r);
    by_r[row.estimate.r].push_back(row.estimate);
  }

  bool all_pass = true;
  for (double r : r_order) {
    try {
      const SlopeFit fit = fit_slope(by_r[r], window);
      const Verdict v = compare(fit, curve, r, c.tol);
      out << describe(v) << " points=" << fit.points_used;
      if (!fit.dropped_db.empty()) out << " dropped=" << fit.dropped_db.size();
      out << "\n";
      all_pass = all_pass && v.pass;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::InsufficientEvents) {
        throw;
      }
      out << "r=" << r << " " << to_string(e.code()) << ": " << e.what() << " -> FAIL\n";
      all_pass = false;
    }
  }
  return all_pass ? kExitOk : kExitFailed;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const Scenario sc = build_scenario(c);
  const std::uint64_t n = c.samples == 0 ? 1000000 : c.samples;
  bool all_pass = true;
  for (std::size_t i = 0; i < sc.users(); ++i) {
    const GainReport rep = validate_gain_distribution(sc, i, n, c.seed);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "user=%zu shape=%d n=%llu mean=%.5f (err %.3f%%) var=%.5f (err %.3f%%) "
                  "ks=%.5f (crit %.5f) -> %s\n",
                  i + 1, rep.shape, static_cast<unsigned long long>(rep.n_samples), rep.mean,
                  100.0 * rep.mean_rel_err, rep.variance, 100.0 * rep.var_rel_err, rep.ks,
                  rep.ks_critical, rep.pass ? "PASS" : "FAIL");
    out << buf;
    all_pass = all_pass && rep.pass;
  }
  return all_pass ? kExitOk : kExitFailed;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing helpers

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (auto tok : split(text, ',')) out.push_back(parse_number(tok));
  return out;
}

std::vector<Snr> parse_snr_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {Snr::from_db(parse_plain_double(parts[0]))};
  if (parts.size() != 3) throw invalid("SNR grid must be start:stop:step");
  const double start = parse_plain_double(parts[0]);
  const double stop = parse_plain_double(parts[1]);
  const double step = parse_plain_double(parts[2]);
  if (!(step > 0.0)) throw invalid("SNR step must be > 0");
  if (stop < start) throw invalid("SNR grid stop < start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  if (count > 10000) throw invalid("SNR grid too large");
  std::vector<Snr> out;
  for (long i = 0; i <= count; ++i) out.push_back(Snr::from_db(start + i * step));
  return out;
}

std::pair<double, double> parse_window(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw invalid("window must be min:max in dB");
  const double lo = parse_plain_double(parts[0]);
  const double hi = parse_plain_double(parts[1]);
  if (hi < lo) throw invalid("window max < min");
  return {lo, hi};
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto line : split(text, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw invalid("config line without '=': " + std::string(line));
    std::string key(trim(line.substr(0, eq)));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) throw invalid("config line with empty key");
    out.emplace_back(std::move(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

std::string format_rows_csv(const std::vector<SimulationRow>& rows) {
  std::string s(kSimulateHeader);
  s += '\n';
  for (const auto& row : rows) {
    const auto& e = row.estimate;
    s += row.scenario + ',' + std::to_string(row.k) + ',' + std::to_string(row.m) + ',' +
         join_weights(row.weights) + ',' + fmt17(e.r) + ',' + fmt17(e.rho_db) + ',' +
         std::to_string(e.n_samples) + ',' + std::to_string(e.n_outages) + ',' +
         fmt17(e.p_hat) + ',' + fmt17(e.ci_low) + ',' + fmt17(e.ci_high) + ',' +
         std::to_string(row.seed) + ',' + std::to_string(row.shards) + '\n';
  }
  return s;
}

std::string format_rows_json(const std::vector<SimulationRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    const auto& e = row.estimate;
    arr.push_back({{"scenario", row.scenario},
                   {"K", row.k},
                   {"M", row.m},
                   {"weights", row.weights},
                   {"r", e.r},
                   {"rho_db", e.rho_db},
                   {"n_samples", e.n_samples},
                   {"n_outages", e.n_outages},
                   {"p_hat", e.p_hat},
                   {"ci_low", e.ci_low},
                   {"ci_high", e.ci_high},
                   {"seed", row.seed},
                   {"shards", row.shards}});
  }
  return arr.dump(2) + "\n";
}

std::vector<SimulationRow> parse_rows(std::string_view text) {
  const auto body = trim(text);
  if (body.empty()) throw invalid("input is empty");
  std::vector<SimulationRow> rows;

  auto finish = [](SimulationRow& row) {
    row.estimate.rho = Snr::from_db(row.estimate.rho_db).linear();
    if (row.estimate.n_outages > row.estimate.n_samples) {
      throw invalid("row has more outages than samples");
    }
  };

  if (body.front() == '[') {
    json arr;
    try {
      arr = json::parse(body);
      for (const auto& j : arr) {
        SimulationRow row;
        row.scenario = j.at("scenario").get<std::string>();
        row.k = j.at("K").get<std::size_t>();
        row.m = j.at("M").get<int>();
        row.weights = j.at("weights").get<std::vector<double>>();
        row.estimate.r = j.at("r").get<double>();
        row.estimate.rho_db = j.at("rho_db").get<double>();
        row.estimate.n_samples = j.at("n_samples").get<std::uint64_t>();
        row.estimate.n_outages = j.at("n_outages").get<std::uint64_t>();
        row.estimate.p_hat = j.at("p_hat").get<double>();
        row.estimate.ci_low = j.at("ci_low").get<double>();
        row.estimate.ci_high = j.at("ci_high").get<double>();
        row.seed = j.at("seed").get<std::uint64_t>();
        row.shards = j.at("shards").get<std::uint32_t>();
        finish(row);
        rows.push_back(std::move(row));
      }
    } catch (const json::exception& e) {
      throw invalid(std::string("malformed JSON table: ") + e.what());
    }
  } else {
    const auto lines = split(body, '\n');
    if (trim(lines.front()) != kSimulateHeader) {
      throw invalid("unexpected CSV header; expected '" + std::string(kSimulateHeader) + "'");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto line = trim(lines[i]);
      if (line.empty()) continue;
      const auto f = split(line, ',');
      if (f.size() != 13) {
        throw invalid("line " + std::to_string(i + 1) + ": expected 13 fields");
      }
      SimulationRow row;
      row.scenario = std::string(trim(f[0]));
      row.k = parse_count(f[1]);
      row.m = static_cast<int>(parse_count(f[2]));
      for (auto w : split(f[3], ';')) row.weights.push_back(parse_plain_double(w));
      row.estimate.r = parse_plain_double(f[4]);
      row.estimate.rho_db = parse_plain_double(f[5]);
      row.estimate.n_samples = parse_count(f[6]);
      row.estimate.n_outages = parse_count(f[7]);
      row.estimate.p_hat = parse_plain_double(f[8]);
      row.estimate.ci_low = parse_plain_double(f[9]);
      row.estimate.ci_high = parse_plain_double(f[10]);
      row.seed = parse_count(f[11]);
      row.shards = static_cast<std::uint32_t>(parse_count(f[12]));
      finish(row);
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) throw invalid("input has no data rows");
  return rows;
}

// ---------------------------------------------------------------------------
// Entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diversity-multiplexing tradeoff curves and outage simulation"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* curve = app.add_subcommand("curve", "write the DMT corner points and a dense sampling");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo outage probability table");
  auto* fit = app.add_subcommand("fit", "fit diversity slopes and compare with the analytic DMT");
  auto* validate = app.add_subcommand("validate", "check effective gains against Gamma(k,1)");
  for (auto* cmd : {curve, simulate, fit, validate}) add_common_flags(cmd, cfg);
  fit->add_option("--in,input", cfg.input, "table produced by simulate (csv or json)");
  fit->add_option("--window", cfg.window, "SNR window min:max in dB");
  fit->add_option("--tol", cfg.tol, "relative tolerance on the diversity");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("dmt-tool");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!cfg.config.empty()) apply_config_file(active, cfg.config);
    if (active == curve) return cmd_curve(cfg, out);
    if (active == simulate) return cmd_simulate(cfg, out);
    if (active == fit) return cmd_fit(cfg, out);
    return cmd_validate(cfg, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace dmt::cli
