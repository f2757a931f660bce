#include "p2pbandit/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

std::string_view protocol_tag(Protocol p) {
  switch (p) {
    case Protocol::kNoSharing: return "nosharing";
    case Protocol::kInstSharing: return "instsharing";
    case Protocol::kDelayed: return "delayed";
    case Protocol::kRoundRobin: return "roundrobin";
    case Protocol::kDcb: return "dcb";
    case Protocol::kDccb: return "dccb";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view tag) {
  for (Protocol p : {Protocol::kNoSharing, Protocol::kInstSharing, Protocol::kDelayed, Protocol::kRoundRobin,
                     Protocol::kDcb, Protocol::kDccb}) {
    if (protocol_tag(p) == tag) return p;
  }
  throw ConfigError("unknown protocol '" + std::string(tag) +
                    "' (expected nosharing, instsharing, delayed, roundrobin, dcb or dccb)");
}

AgentState::AgentState(int V, int d) : active(d), local(d), neighbors(static_cast<std::size_t>(V)) {
  std::iota(neighbors.begin(), neighbors.end(), 0);
}

DelaySchedule::DelaySchedule(int V, double multiplier, double log_base)
    : V_(V), multiplier_(multiplier), log_base_(log_base) {
  if (V < 1) throw ConfigError("delay schedule needs V >= 1");
  if (!(multiplier >= 0.0)) throw ConfigError("delay multiplier must be >= 0");
  if (!(log_base > 1.0)) throw ConfigError("delay log base must be > 1");
}

int DelaySchedule::budget(int t) const {
  if (t < 1) throw InputError("delay budget: round must be >= 1");
  if (V_ == 1 || multiplier_ == 0.0) return 0;
  const double log2_arg = 1.5 * std::log2(static_cast<double>(V_)) + std::log2(static_cast<double>(t));
  const double value = log_base_ == 2.0 ? log2_arg : log2_arg / std::log2(log_base_);
  // The small offset keeps exact powers of the base from rounding up.
  return std::max(0, static_cast<int>(std::ceil(multiplier_ * value - 1e-9)));
}

int DelaySchedule::tau(int t) const { return std::max(0, t - budget(t)); }

int delay_budget(int t, int V) { return DelaySchedule(V).budget(t); }

Permutation draw_permutation(Rng& rng, const std::vector<std::vector<int>>& groups, int V) {
  Permutation sigma(static_cast<std::size_t>(V), -1);
  std::vector<char> seen(static_cast<std::size_t>(V), 0);
  for (const auto& g : groups) {
    for (int a : g) {
      if (a < 0 || a >= V || seen[a]) throw InputError("draw_permutation: groups must partition the agents");
      seen[a] = 1;
    }
    std::vector<int> image = g;
    std::shuffle(image.begin(), image.end(), rng);
    for (std::size_t k = 0; k < g.size(); ++k) sigma[g[k]] = image[k];
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw InputError("draw_permutation: groups must cover every agent");
  return sigma;
}

Network::Network(Protocol p, int V_, int d_, DelaySchedule s) : protocol(p), V(V_), d(d_), schedule(s) {
  if (V < 1 || d < 1) throw ConfigError("network needs V >= 1 and d >= 1");
  agents.reserve(static_cast<std::size_t>(V));
  for (int i = 0; i < V; ++i) agents.emplace_back(V, d);
}

void Network::track_weights(int horizon) {
  if (protocol != Protocol::kDcb && protocol != Protocol::kDccb)
    throw ConfigError("weight tracking applies to the dcb and dccb protocols only");
  weights.emplace(V, horizon);
}

void average_buffers(Network& net, const std::vector<int>& partner) {
  std::vector<ShareBuffer> snapshot;
  snapshot.reserve(net.agents.size());
  for (const auto& a : net.agents) snapshot.push_back(a.buffer);
  for (int i = 0; i < net.V; ++i) {
    const int j = partner[i];
    if (j == i) continue;
    const ShareBuffer& mine = snapshot[i];
    const ShareBuffer& theirs = snapshot[j];
    if (mine.size() != theirs.size())
      throw ProtocolError("gossip: buffer length mismatch between agents " + std::to_string(i) + " and " +
                          std::to_string(j));
    ShareBuffer& out = net.agents[i].buffer;
    for (std::size_t k = 0; k < mine.size(); ++k) {
      out[k].M = 0.5 * (mine[k].M + theirs[k].M);
      out[k].v = 0.5 * (mine[k].v + theirs[k].v);
      out[k].source_round = mine[k].source_round == theirs[k].source_round ? mine[k].source_round : -1;
    }
  }
  if (net.weights) net.weights->average(partner);
}

void append_observation(Network& net, int i, const Observation& obs, double scale, int t) {
  BufferEntry e{scale * obs.x * obs.x.transpose(), (scale * obs.r) * obs.x, t};
  net.agents[i].buffer.push_back(std::move(e));
  if (net.weights) net.weights->append(i, i, t, scale);
}

void flush_to_budget(Network& net, int i, int budget) {
  AgentState& a = net.agents[i];
  while (a.buffer.size() > static_cast<std::size_t>(std::max(budget, 0))) {
    BufferEntry& e = a.buffer.front();
    a.active.A.add(e.M);
    a.active.b += e.v;
    a.active_through = std::max(a.active_through, e.source_round);
    a.buffer.pop_front();
    if (net.weights) net.weights->flush_front(i);
  }
}

void gossip_round(Network& net, const Permutation& sigma, std::span<const Observation> obs, int t) {
  if (static_cast<int>(sigma.size()) != net.V || static_cast<int>(obs.size()) != net.V)
    throw ProtocolError("gossip_round: one permutation entry and one observation per agent required");
  average_buffers(net, sigma);
  const double scale = static_cast<double>(net.V);
  for (int i = 0; i < net.V; ++i) append_observation(net, i, obs[i], scale, t);
  const int budget = net.schedule.budget(t);
  for (int i = 0; i < net.V; ++i) flush_to_budget(net, i, budget);
}

namespace {

void observe_all(AgentState& a, std::span<const Observation> obs) {
  for (const auto& o : obs) a.active.observe(o.x, o.r);
}

void round_robin(Network& net, std::span<const Observation> obs, int t) {
  net.recent.emplace_back(obs.begin(), obs.end());
  while (static_cast<int>(net.recent.size()) > net.V) net.recent.pop_front();
  const int newest = static_cast<int>(net.recent.size()) - 1;
  for (int i = 0; i < net.V; ++i) {
    AgentState& a = net.agents[i];
    // The ring passes data 0 → 1 → … → V-1 → 0, one hop per round, so agent i
    // gets agent (i-k)'s round t-k observation now.
    for (int k = 0; k <= newest; ++k) {
      const int source = ((i - k) % net.V + net.V) % net.V;
      const Observation& o = net.recent[newest - k][source];
      a.active.observe(o.x, o.r);
    }
    a.active_through = std::max(0, t - net.V + 1);
  }
}

void delayed(Network& net, std::span<const Observation> obs, int t) {
  net.pending.emplace_back(t, std::vector<Observation>(obs.begin(), obs.end()));
  const int tau = net.schedule.tau(t);
  while (!net.pending.empty() && net.pending.front().first <= tau) {
    const auto& [round, batch] = net.pending.front();
    for (auto& a : net.agents) {
      observe_all(a, batch);
      a.active_through = round;
    }
    net.pending.pop_front();
  }
}

}  // namespace

void step(Network& net, int t, std::span<const Observation> obs, const Permutation& sigma) {
  if (static_cast<int>(obs.size()) != net.V) throw ProtocolError("step: one observation per agent required");
  for (int i = 0; i < net.V; ++i) net.agents[i].local.observe(obs[i].x, obs[i].r);
  switch (net.protocol) {
    case Protocol::kNoSharing:
      for (int i = 0; i < net.V; ++i) {
        net.agents[i].active.observe(obs[i].x, obs[i].r);
        net.agents[i].active_through = t;
      }
      return;
    case Protocol::kInstSharing:
      for (auto& a : net.agents) {
        observe_all(a, obs);
        a.active_through = t;
      }
      return;
    case Protocol::kDelayed:
      delayed(net, obs, t);
      return;
    case Protocol::kRoundRobin:
      round_robin(net, obs, t);
      return;
    case Protocol::kDcb:
      gossip_round(net, sigma, obs, t);
      return;
    case Protocol::kDccb:
      throw ConfigError("dccb rounds are driven by dccb_round");
  }
}

}  // namespace p2pbandit
