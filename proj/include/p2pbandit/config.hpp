#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "p2pbandit/sharing.hpp"

namespace p2pbandit {

/// Everything needed to reproduce one run. Keys of the flat config format
/// are the field names below (cluster sizes: `clusters=8,8`).
struct RunConfig {
  Protocol protocol = Protocol::kDcb;
  int V = 16;
  int d = 5;
  int m = 10;
  int T = 2000;
  double delta = 0.1;
  double R = 0.5;
  double S = 1.0;
  double gamma = 1.0;               ///< separation, used only with several clusters
  std::vector<int> clusters;        ///< empty: one cluster of all V agents
  std::optional<double> lambda;     ///< default 1/d (sphere contexts)
  std::uint64_t seed = 0;
  double delay_mult = 4.0;
  double delay_log_base = 2.0;
  std::optional<double> thresh_coef;  ///< λt coefficient in A_λ; default 1/δ
  bool track_weights = false;
  bool emit_bounds = false;
  bool lemma_checks = false;
  bool per_agent = false;

  std::vector<int> cluster_sizes() const;
  double context_lambda() const { return lambda.value_or(1.0 / d); }
};

/// Parses `key=value` lines; blank lines and `#` comments are ignored.
/// Missing keys keep their defaults. Throws ConfigError carrying the line
/// number for malformed lines, unknown keys and out-of-range values.
RunConfig parse_config(std::string_view text);

/// Reads and parses a config file.
RunConfig load_config(const std::string& path);

/// Applies one key=value assignment (also used for CLI overrides).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Cross-field checks (cluster sizes sum to V, ...). Throws ConfigError.
void validate(const RunConfig& cfg);

/// Round-trippable key=value rendering of a config.
std::string to_text(const RunConfig& cfg);

}  // namespace p2pbandit
