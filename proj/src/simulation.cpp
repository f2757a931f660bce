#include "p2pbandit/simulation.hpp"

#include <algorithm>
#include <ostream>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

ClusterProblem problem_for(const RunConfig& cfg) {
  ProblemSpec spec;
  spec.cluster_sizes = cfg.cluster_sizes();
  spec.d = cfg.d;
  spec.m = cfg.m;
  spec.R = cfg.R;
  spec.S = cfg.S;
  spec.gamma = cfg.gamma;
  spec.seed = cfg.seed;
  ClusterProblem p = make_cluster_problem(spec);
  p.lambda = cfg.context_lambda();
  return p;
}

Simulation::Simulation(const RunConfig& cfg) : Simulation(cfg, problem_for(cfg)) {}

Simulation::Simulation(const RunConfig& cfg, ClusterProblem problem)
    : cfg_(cfg),
      problem_(std::move(problem)),
      net_(cfg.protocol, cfg.V, cfg.d, DelaySchedule(cfg.V, cfg.delay_mult, cfg.delay_log_base)),
      conf_{cfg.delta, cfg.R, cfg.S, 0.0} {
  validate(cfg_);
  if (problem_.V != cfg_.V || problem_.d != cfg_.d) throw ConfigError("problem does not match the config's V and d");
  if (cfg_.track_weights) net_.track_weights(cfg_.T);
  contexts_.resize(static_cast<std::size_t>(cfg_.V));
  choices_.resize(static_cast<std::size_t>(cfg_.V));
}

ThresholdParams Simulation::threshold_params() const {
  return ThresholdParams{problem_.lambda, cfg_.delta, cfg_.R, cfg_.d, cfg_.thresh_coef};
}

bool Simulation::clusters_recovered() const {
  for (int i = 0; i < cfg_.V; ++i)
    if (net_.agents[i].neighbors != problem_.clusters[problem_.cluster_of[i]].members) return false;
  return true;
}

void Simulation::step() {
  if (done()) throw PreconditionError("simulation already reached its horizon");
  const int t = ++t_;
  const int V = cfg_.V;

  Permutation sigma;
  {
    Rng rng = make_stream(cfg_.seed, 0, static_cast<std::uint64_t>(t), StreamTag::kPermutation);
    if (cfg_.protocol == Protocol::kDccb) {
      sigma = draw_permutation(rng, contact_groups(net_), V);
    } else {
      std::vector<int> all(static_cast<std::size_t>(V));
      for (int i = 0; i < V; ++i) all[i] = i;
      sigma = draw_permutation(rng, {all}, V);
    }
  }

  std::vector<Observation> obs(static_cast<std::size_t>(V));
  std::vector<double> regret(static_cast<std::size_t>(V));
  for (int i = 0; i < V; ++i) {
    Rng ctx_rng = make_stream(cfg_.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t),
                              StreamTag::kContexts);
    contexts_[i] = sample_context_set(ctx_rng, cfg_.m, cfg_.d);
    const PolicyState& state = net_.agents[i].active;
    const ActionChoice choice = select_action(contexts_[i], state, confidence_radius(state, conf_));
    choices_[i] = choice.index;
    const Vec& theta = problem_.theta_of(i);
    Rng noise_rng =
        make_stream(cfg_.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t), StreamTag::kNoise);
    obs[i].x = contexts_[i][choice.index];
    obs[i].r = reward(obs[i].x, theta, cfg_.R, noise_rng);
    regret[i] = instantaneous_regret(contexts_[i], theta, choice.index);
    max_delay_ = std::max(max_delay_, t - net_.agents[i].active_through);
  }
  trace_.delay.push_back(max_delay_);
  for (const auto& hook : hooks_) hook(*this, t, obs);

  // Bits are counted on what is exchanged this round: the round-start buffer.
  const std::size_t exchanged = net_.agents.front().buffer.size();
  int cross = 0;
  if (cfg_.protocol == Protocol::kDccb) {
    DccbRoundReport report = dccb_round(net_, sigma, obs, t, threshold_params());
    for (const auto& [a, b] : report.shares)
      if (problem_.cluster_of[a] != problem_.cluster_of[b]) ++cross;
    trace_.prunes.insert(trace_.prunes.end(), report.prunes.begin(), report.prunes.end());
  } else {
    p2pbandit::step(net_, t, obs, sigma);
    if (cfg_.protocol == Protocol::kDcb)
      for (int i = 0; i < V; ++i)
        if (sigma[i] != i && problem_.cluster_of[i] != problem_.cluster_of[sigma[i]]) ++cross;
  }
  trace_.cross_cluster_shares.push_back(cross);

  RoundMetrics m;
  m.round = t;
  for (double r : regret) m.regret_round += r;
  const RoundMetrics* prev = trace_.rounds.empty() ? nullptr : &trace_.rounds.back();
  m.cum_regret = (prev ? prev->cum_regret : 0.0) + m.regret_round;
  m.comm_bits_round = comm_bits(cfg_.protocol, t, V, cfg_.d, exchanged);
  m.comm_bits_cum = (prev ? prev->comm_bits_cum : 0) + m.comm_bits_round;
  int discovered = 0;
  for (int i = 0; i < V; ++i)
    if (net_.agents[i].neighbors == problem_.clusters[problem_.cluster_of[i]].members) ++discovered;
  m.clusters_discovered_frac = static_cast<double>(discovered) / V;
  trace_.rounds.push_back(m);

  std::vector<double> cluster_cum =
      trace_.cluster_cum_regret.empty() ? std::vector<double>(problem_.clusters.size(), 0.0)
                                        : trace_.cluster_cum_regret.back();
  for (int i = 0; i < V; ++i) cluster_cum[problem_.cluster_of[i]] += regret[i];
  trace_.cluster_cum_regret.push_back(std::move(cluster_cum));
  if (cfg_.per_agent) trace_.agent_regret.push_back(std::move(regret));

  if (discovered == V) {
    if (!trace_.recovery_round) trace_.recovery_round = t;
  } else {
    trace_.recovery_round.reset();
  }
}

void Simulation::run() {
  while (!done()) step();
}

std::vector<double> bound_series(const RunConfig& cfg, const ClusterProblem& problem, const RunTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.rounds.size());
  const int V = cfg.V;
  const int d = cfg.d;
  for (std::size_t k = 0; k < trace.rounds.size(); ++k) {
    const double t = trace.rounds[k].round;
    double b = 0.0;
    switch (cfg.protocol) {
      case Protocol::kNoSharing: b = bound_nosharing(t, V, d, cfg.delta, cfg.R, cfg.S); break;
      case Protocol::kInstSharing: b = bound_delayed(t, V, d, cfg.delta, cfg.R, cfg.S, 0); break;
      case Protocol::kDelayed:
      case Protocol::kRoundRobin: b = bound_delayed(t, V, d, cfg.delta, cfg.R, cfg.S, trace.delay[k]); break;
      case Protocol::kDcb: b = bound_dcb(t, V, d, cfg.delta, cfg.R, cfg.S); break;
      case Protocol::kDccb: {
        const double discovery = trace.recovery_round ? *trace.recovery_round : cfg.T;
        for (const auto& c : problem.clusters)
          b += bound_dccb(t, static_cast<int>(c.members.size()), V, d, cfg.delta, cfg.R, cfg.S, discovery);
        break;
      }
    }
    out.push_back(b);
  }
  return out;
}

std::string run_id(const RunConfig& cfg) {
  return std::string(protocol_tag(cfg.protocol)) + "-s" + std::to_string(cfg.seed);
}

void write_runs_csv(std::ostream& out, const RunConfig& cfg, const ClusterProblem& problem, const RunTrace& trace) {
  const auto old_precision = out.precision(12);
  out << "# V=" << cfg.V << " d=" << cfg.d << " m=" << cfg.m << " T=" << cfg.T << " delta=" << cfg.delta
      << " R=" << cfg.R << " S=" << cfg.S << " lambda=" << problem.lambda << " gamma=" << problem.gamma << "\n";
  for (std::size_t k = 0; k < problem.clusters.size(); ++k) {
    const auto& c = problem.clusters[k];
    out << "# cluster=" << k << " agents=" << c.members.front() << "-" << c.members.back() << " theta=";
    for (int j = 0; j < c.theta.size(); ++j) out << (j ? ";" : "") << c.theta[j];
    out << "\n";
  }
  out << "# recovery_round=" << (trace.recovery_round ? std::to_string(*trace.recovery_round) : "none") << "\n";

  std::vector<double> bounds;
  if (cfg.emit_bounds) bounds = bound_series(cfg, problem, trace);
  out << "run_id,protocol,seed,round,network_cum_regret,comm_bits_round,comm_bits_cum,clusters_discovered_frac";
  if (cfg.emit_bounds) out << ",bound_value";
  out << "\n";
  const std::string id = run_id(cfg);
  for (std::size_t k = 0; k < trace.rounds.size(); ++k) {
    const auto& r = trace.rounds[k];
    out << id << ',' << protocol_tag(cfg.protocol) << ',' << cfg.seed << ',' << r.round << ',' << r.cum_regret << ','
        << r.comm_bits_round << ',' << r.comm_bits_cum << ',' << r.clusters_discovered_frac;
    if (cfg.emit_bounds) out << ',' << bounds[k];
    out << "\n";
  }
  out.precision(old_precision);
}

void write_prunes_csv(std::ostream& out, const RunTrace& trace) {
  const auto old_precision = out.precision(12);
  out << "round,agent_a,agent_b,distance,threshold\n";
  for (const auto& e : trace.prunes)
    out << e.round << ',' << e.agent_a << ',' << e.agent_b << ',' << e.distance << ',' << e.threshold << "\n";
  out.precision(old_precision);
}

void write_agents_csv(std::ostream& out, const RunTrace& trace) {
  const auto old_precision = out.precision(12);
  out << "round,agent,regret\n";
  for (std::size_t k = 0; k < trace.agent_regret.size(); ++k)
    for (std::size_t i = 0; i < trace.agent_regret[k].size(); ++i)
      out << k + 1 << ',' << i << ',' << trace.agent_regret[k][i] << "\n";
  out.precision(old_precision);
}

RunTrace run_experiment(const RunConfig& cfg) {
  Simulation sim(cfg);
  sim.run();
  return sim.trace();
}

}  // namespace p2pbandit
