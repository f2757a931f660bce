// Command-line front end: `simulate` runs one seeded experiment and writes
// CSVs, `verify` runs the lemma suites. Exit codes: 0 ok, 1 config error,
// 2 lemma violation.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "p2pbandit/config.hpp"
#include "p2pbandit/errors.hpp"
#include "p2pbandit/lemmas.hpp"
#include "p2pbandit/simulation.hpp"

namespace fs = std::filesystem;
using namespace p2pbandit;

namespace {

constexpr int kConfigFailure = 1;
constexpr int kLemmaFailure = 2;

void write_reports(std::ostream& out, const std::vector<LemmaReport>& reports) {
  out.precision(10);
  out << "lemma_id,trials,violations,worst_slack\n";
  for (const auto& r : reports)
    out << r.lemma_id << ',' << r.trials << ',' << r.violations << ',' << r.worst_slack << "\n";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

int simulate(const std::string& config_path, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
             const std::optional<std::string>& protocol) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (protocol) apply_setting(cfg, "protocol", *protocol);
  validate(cfg);

  Simulation sim(cfg);
  std::unique_ptr<DetWeightMonitor> det;
  if (cfg.lemma_checks && cfg.protocol == Protocol::kDcb) det = std::make_unique<DetWeightMonitor>(sim);
  LemmaReport sums{"weight_sum"};
  while (!sim.done()) {
    sim.step();
    if (cfg.lemma_checks) check_weight_sum(sums, sim);
  }

  fs::create_directories(out_dir);
  const std::string id = run_id(cfg);
  auto runs = open_out(fs::path(out_dir) / (id + ".csv"));
  write_runs_csv(runs, cfg, sim.problem(), sim.trace());
  if (cfg.protocol == Protocol::kDccb) {
    auto prunes = open_out(fs::path(out_dir) / (id + "_prunes.csv"));
    write_prunes_csv(prunes, sim.trace());
  }
  if (cfg.per_agent) {
    auto agents = open_out(fs::path(out_dir) / (id + "_agents.csv"));
    write_agents_csv(agents, sim.trace());
  }
  const auto& last = sim.trace().rounds.back();
  std::cout << id << ": cum_regret=" << last.cum_regret << " comm_bits=" << last.comm_bits_cum << "\n";

  if (cfg.lemma_checks) {
    std::vector<LemmaReport> reports{sums};
    if (det) reports.push_back(det->report());
    auto lemmas = open_out(fs::path(out_dir) / (id + "_lemmas.csv"));
    write_reports(lemmas, reports);
    write_reports(std::cout, reports);
    for (const auto& r : reports)
      if (!r.passed()) return kLemmaFailure;
  }
  return 0;
}

int verify(const std::string& suite) {
  const auto reports = run_suite(suite);
  write_reports(std::cout, reports);
  for (const auto& r : reports)
    if (!r.passed()) return kLemmaFailure;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer-to-peer linear bandit simulator"};
  app.require_subcommand(1);

  auto* sim_cmd = app.add_subcommand("simulate", "run one experiment and write CSVs");
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> protocol;
  sim_cmd->add_option("--config", config_path, "key=value config file");
  sim_cmd->add_option("--out", out_dir, "output directory");
  sim_cmd->add_option("--seed", seed, "override the config seed");
  sim_cmd->add_option("--protocol", protocol, "override the config protocol");

  auto* verify_cmd = app.add_subcommand("verify", "run lemma verification suites");
  std::string suite = "all";
  std::string ids = "all";
  for (const auto& s : suite_ids()) ids += "|" + s;
  verify_cmd->add_option("--suite", suite, ids);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    if (*sim_cmd) return simulate(config_path, out_dir, seed, protocol);
    return verify(suite);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  }
}
