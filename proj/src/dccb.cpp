#include "p2pbandit/dccb.hpp"

#include <algorithm>
#include <cmath>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

double a_lambda(int t, double delta, double lambda, std::optional<double> growth_coef) {
  const double coef = growth_coef.value_or(1.0 / delta);
  const double log_term = std::log((t + 3.0) / delta);
  return coef * lambda * t - 8.0 * log_term - 2.0 * std::sqrt(t * log_term);
}

double threshold(int t, const ThresholdParams& p) {
  if (t < 1) throw InputError("threshold: round must be >= 1");
  const double numerator =
      p.R * std::sqrt(2.0 * p.d * std::log(static_cast<double>(t)) + 2.0 * std::log(2.0 / p.delta)) + 1.0;
  const double a = a_lambda(t, p.delta / (4.0 * p.d), p.lambda, p.growth_coef);
  return numerator / std::sqrt(1.0 + std::max(a, 0.0));
}

bool should_prune(const Vec& theta_i, const Vec& theta_j, double c) {
  if (theta_i.size() != theta_j.size()) throw InputError("should_prune: dimension mismatch");
  return (theta_i - theta_j).norm() > c;
}

void reset_to_local(Network& net, int i, std::size_t pad, int t) {
  AgentState& a = net.agents[i];
  const int d = net.d;
  a.active = a.local;
  a.buffer.assign(pad, BufferEntry{Mat::Zero(d, d), Vec::Zero(d), -1});
  a.buffer.push_back(BufferEntry{a.local.A.matrix() - Mat::Identity(d, d), a.local.b, -1});
  a.active_through = 0;
  if (net.weights) net.weights->reset(i, t, pad);
}

namespace {

void drop_neighbor(AgentState& a, int j) {
  auto it = std::lower_bound(a.neighbors.begin(), a.neighbors.end(), j);
  if (it != a.neighbors.end() && *it == j) a.neighbors.erase(it);
}

bool has_neighbor(const AgentState& a, int j) {
  return std::binary_search(a.neighbors.begin(), a.neighbors.end(), j);
}

}  // namespace

void prune_and_reset(Network& net, int i, int j, std::size_t pad, int t) {
  if (i == j) throw InputError("prune_and_reset: an agent cannot prune itself");
  drop_neighbor(net.agents[i], j);
  drop_neighbor(net.agents[j], i);
  reset_to_local(net, i, pad, t);
  reset_to_local(net, j, pad, t);
}

std::vector<std::vector<int>> contact_groups(const Network& net) {
  std::vector<int> label(static_cast<std::size_t>(net.V), -1);
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < net.V; ++start) {
    if (label[start] >= 0) continue;
    std::vector<int> group{start};
    label[start] = static_cast<int>(groups.size());
    for (std::size_t k = 0; k < group.size(); ++k) {
      for (int n : net.agents[group[k]].neighbors) {
        if (label[n] < 0 && has_neighbor(net.agents[n], group[k])) {
          label[n] = label[start];
          group.push_back(n);
        }
      }
    }
    std::sort(group.begin(), group.end());
    groups.push_back(std::move(group));
  }
  return groups;
}

DccbRoundReport dccb_round(Network& net, const Permutation& sigma, std::span<const Observation> obs, int t,
                           const ThresholdParams& params) {
  if (static_cast<int>(sigma.size()) != net.V || static_cast<int>(obs.size()) != net.V)
    throw ProtocolError("dccb_round: one permutation entry and one observation per agent required");

  const int V = net.V;
  std::vector<Vec> estimate;
  std::vector<std::vector<int>> neighbors;
  estimate.reserve(static_cast<std::size_t>(V));
  neighbors.reserve(static_cast<std::size_t>(V));
  for (const auto& a : net.agents) {
    estimate.push_back(local_estimate(a.local));
    neighbors.push_back(a.neighbors);
  }
  const std::size_t pad = net.agents.front().buffer.size();
  const double c = threshold(t, params);

  DccbRoundReport report;
  std::vector<int> partner(static_cast<std::size_t>(V));
  std::vector<char> reset(static_cast<std::size_t>(V), 0);
  for (int i = 0; i < V; ++i) {
    const int j = sigma[i];
    partner[i] = i;
    if (j == i || !std::binary_search(neighbors[i].begin(), neighbors[i].end(), j)) continue;
    const double dist = (estimate[i] - estimate[j]).norm();
    if (dist > c) {
      report.prunes.push_back({t, i, j, dist, c});
      reset[i] = reset[j] = 1;
    } else if (neighbors[i] == neighbors[j]) {
      partner[i] = j;
      report.shares.emplace_back(i, j);
    }
  }

  std::erase_if(report.shares, [&](const auto& s) { return reset[s.first] != 0; });

  for (int i = 0; i < V; ++i) net.agents[i].local.observe(obs[i].x, obs[i].r);
  average_buffers(net, partner);
  for (int i = 0; i < V; ++i) {
    if (reset[i]) continue;
    append_observation(net, i, obs[i], static_cast<double>(neighbors[i].size()), t);
  }
  for (const auto& e : report.prunes) prune_and_reset(net, e.agent_a, e.agent_b, pad, t);

  const int budget = net.schedule.budget(t);
  for (int i = 0; i < V; ++i) flush_to_budget(net, i, budget);
  return report;
}

}  // namespace p2pbandit
