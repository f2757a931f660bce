#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p2pbandit/bandit_env.hpp"
#include "p2pbandit/config.hpp"
#include "p2pbandit/dccb.hpp"
#include "p2pbandit/metrics.hpp"
#include "p2pbandit/sharing.hpp"

namespace p2pbandit {

/// Everything a run records, one entry per round where applicable.
struct RunTrace {
  std::vector<RoundMetrics> rounds;
  std::vector<std::vector<double>> agent_regret;        ///< [round][agent], only with per_agent
  std::vector<std::vector<double>> cluster_cum_regret;  ///< [round][cluster]
  std::vector<PruneEvent> prunes;
  std::vector<int> cross_cluster_shares;  ///< [round] buffer exchanges between different true clusters
  /// First round from whose end on every neighbor set equals the agent's
  /// true cluster (through the last simulated round).
  std::optional<int> recovery_round;
  std::vector<int> delay;  ///< [round] max_{k≤t}(k − τ(k)) over agents
};

/**
 * One seeded run of one protocol. Environment draws come from streams keyed
 * by (seed, agent, round), so protocols compared under one seed face the
 * same contexts and the same noise sequence.
 */
class Simulation {
 public:
  /// Called once per round after every agent has chosen and been rewarded,
  /// before any sharing happens. The network holds the decision-time state.
  using DecisionHook = std::function<void(const Simulation&, int t, std::span<const Observation>)>;

  explicit Simulation(const RunConfig& cfg);
  Simulation(const RunConfig& cfg, ClusterProblem problem);

  /// Advances one round. Throws PreconditionError once the horizon is reached.
  void step();
  void run();

  int round() const noexcept { return t_; }
  bool done() const noexcept { return t_ >= cfg_.T; }

  const RunConfig& config() const noexcept { return cfg_; }
  const ClusterProblem& problem() const noexcept { return problem_; }
  const Network& network() const noexcept { return net_; }
  const RunTrace& trace() const noexcept { return trace_; }
  const ConfidenceParams& confidence() const noexcept { return conf_; }
  ThresholdParams threshold_params() const;

  /// Contexts and choices of the most recent round.
  const std::vector<ContextSet>& last_contexts() const noexcept { return contexts_; }
  const std::vector<std::size_t>& last_choices() const noexcept { return choices_; }

  void on_decisions(DecisionHook hook) { hooks_.push_back(std::move(hook)); }

  /// True when every agent's neighbor set is exactly its true cluster.
  bool clusters_recovered() const;

 private:
  RunConfig cfg_;
  ClusterProblem problem_;
  Network net_;
  ConfidenceParams conf_;
  RunTrace trace_;
  int t_ = 0;
  int max_delay_ = 0;
  std::vector<ContextSet> contexts_;
  std::vector<std::size_t> choices_;
  std::vector<DecisionHook> hooks_;
};

/// The environment a config describes (cluster parameters drawn from its seed).
ClusterProblem problem_for(const RunConfig& cfg);

/// Theoretical bound matching the run's protocol at every round, in the same
/// order as trace.rounds. DCCB sums the per-cluster bound with the measured
/// recovery round as discovery constant (T when the run never recovered).
std::vector<double> bound_series(const RunConfig& cfg, const ClusterProblem& problem, const RunTrace& trace);

/// "<protocol>-s<seed>"
std::string run_id(const RunConfig& cfg);

void write_runs_csv(std::ostream& out, const RunConfig& cfg, const ClusterProblem& problem, const RunTrace& trace);
void write_prunes_csv(std::ostream& out, const RunTrace& trace);
void write_agents_csv(std::ostream& out, const RunTrace& trace);

/// Runs the config to its horizon.
RunTrace run_experiment(const RunConfig& cfg);

}  // namespace p2pbandit
