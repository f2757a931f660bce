#include "p2pbandit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string quoted(std::string_view key) { return "'" + std::string(key) + "'"; }

template <typename T>
T parse_number(std::string_view key, std::string_view value, int line) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty())
    throw ConfigError("key " + quoted(key) + ": cannot parse '" + std::string(value) + "'", line);
  return out;
}

int parse_count(std::string_view key, std::string_view value, int line) {
  const int n = parse_number<int>(key, value, line);
  if (n < 1) throw ConfigError("key " + quoted(key) + " must be >= 1", line);
  return n;
}

double parse_real(std::string_view key, std::string_view value, int line) {
  const double x = parse_number<double>(key, value, line);
  if (!std::isfinite(x)) throw ConfigError("key " + quoted(key) + " must be finite", line);
  return x;
}

bool parse_bool(std::string_view key, std::string_view value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key " + quoted(key) + " expects true/false", line);
}

}  // namespace

std::vector<int> RunConfig::cluster_sizes() const { return clusters.empty() ? std::vector<int>{V} : clusters; }

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line) {
  value = trim(value);
  if (key == "protocol") {
    try {
      cfg.protocol = parse_protocol(value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line);
    }
  } else if (key == "V") {
    cfg.V = parse_count(key, value, line);
  } else if (key == "d") {
    cfg.d = parse_count(key, value, line);
  } else if (key == "m") {
    cfg.m = parse_count(key, value, line);
  } else if (key == "T") {
    cfg.T = parse_count(key, value, line);
  } else if (key == "delta") {
    cfg.delta = parse_real(key, value, line);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("key 'delta' must lie in (0,1)", line);
  } else if (key == "R") {
    cfg.R = parse_real(key, value, line);
    if (cfg.R < 0.0) throw ConfigError("key 'R' must be >= 0", line);
  } else if (key == "S") {
    cfg.S = parse_real(key, value, line);
    if (cfg.S < 0.0) throw ConfigError("key 'S' must be >= 0", line);
  } else if (key == "gamma") {
    cfg.gamma = parse_real(key, value, line);
    if (!(cfg.gamma > 0.0)) throw ConfigError("key 'gamma' must be > 0", line);
  } else if (key == "clusters") {
    cfg.clusters.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      cfg.clusters.push_back(parse_count(key, trim(rest.substr(0, comma)), line));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (cfg.clusters.empty()) throw ConfigError("key 'clusters' needs at least one size", line);
  } else if (key == "lambda") {
    const double l = parse_real(key, value, line);
    if (!(l > 0.0)) throw ConfigError("key 'lambda' must be > 0", line);
    cfg.lambda = l;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value, line);
  } else if (key == "delay_mult") {
    cfg.delay_mult = parse_real(key, value, line);
    if (cfg.delay_mult < 0.0) throw ConfigError("key 'delay_mult' must be >= 0", line);
  } else if (key == "delay_log_base") {
    cfg.delay_log_base = parse_real(key, value, line);
    if (!(cfg.delay_log_base > 1.0)) throw ConfigError("key 'delay_log_base' must be > 1", line);
  } else if (key == "thresh_coef") {
    const double c = parse_real(key, value, line);
    if (!(c > 0.0)) throw ConfigError("key 'thresh_coef' must be > 0", line);
    cfg.thresh_coef = c;
  } else if (key == "track_weights") {
    cfg.track_weights = parse_bool(key, value, line);
  } else if (key == "emit_bounds") {
    cfg.emit_bounds = parse_bool(key, value, line);
  } else if (key == "lemma_checks") {
    cfg.lemma_checks = parse_bool(key, value, line);
  } else if (key == "per_agent") {
    cfg.per_agent = parse_bool(key, value, line);
  } else {
    throw ConfigError("unknown key " + quoted(key), line);
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line_no);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    apply_setting(cfg, key, line.substr(eq + 1), line_no);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
  const auto sizes = cfg.cluster_sizes();
  if (std::accumulate(sizes.begin(), sizes.end(), 0) != cfg.V)
    throw ConfigError("cluster sizes must sum to V");
  if (cfg.lemma_checks && !cfg.track_weights) throw ConfigError("lemma_checks requires track_weights=true");
  if (cfg.track_weights) {
    if (cfg.protocol != Protocol::kDcb && cfg.protocol != Protocol::kDccb)
      throw ConfigError("track_weights applies to the dcb and dccb protocols only");
    if (static_cast<long long>(cfg.V) * cfg.T > WeightTrace::kMaxCells)
      throw ConfigError("track_weights is limited to V*T <= " + std::to_string(WeightTrace::kMaxCells));
  }
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "protocol=" << protocol_tag(cfg.protocol) << "\nV=" << cfg.V << "\nd=" << cfg.d << "\nm=" << cfg.m
      << "\nT=" << cfg.T << "\ndelta=" << cfg.delta << "\nR=" << cfg.R << "\nS=" << cfg.S << "\ngamma=" << cfg.gamma;
  if (!cfg.clusters.empty()) {
    out << "\nclusters=";
    for (std::size_t k = 0; k < cfg.clusters.size(); ++k) out << (k ? "," : "") << cfg.clusters[k];
  }
  if (cfg.lambda) out << "\nlambda=" << *cfg.lambda;
  out << "\nseed=" << cfg.seed << "\ndelay_mult=" << cfg.delay_mult << "\ndelay_log_base=" << cfg.delay_log_base;
  if (cfg.thresh_coef) out << "\nthresh_coef=" << *cfg.thresh_coef;
  out << std::boolalpha << "\ntrack_weights=" << cfg.track_weights << "\nemit_bounds=" << cfg.emit_bounds
      << "\nlemma_checks=" << cfg.lemma_checks << "\nper_agent=" << cfg.per_agent << "\n";
  return out.str();
}

}  // namespace p2pbandit
