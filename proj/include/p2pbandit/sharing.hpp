#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "p2pbandit/linalg.hpp"
#include "p2pbandit/policy.hpp"
#include "p2pbandit/rng.hpp"
#include "p2pbandit/weight_trace.hpp"

namespace p2pbandit {

enum class Protocol { kNoSharing, kInstSharing, kDelayed, kRoundRobin, kDcb, kDccb };

/// CLI/CSV tag: nosharing, instsharing, delayed, roundrobin, dcb, dccb.
std::string_view protocol_tag(Protocol p);
/// Inverse of protocol_tag; throws ConfigError on an unknown tag.
Protocol parse_protocol(std::string_view tag);

/// One buffered contribution. source_round is the round the data came from,
/// or -1 once slots of different origin have been mixed (or after a reset).
struct BufferEntry {
  Mat M;
  Vec v;
  int source_round = -1;
};

/// Oldest entry first.
using ShareBuffer = std::deque<BufferEntry>;

struct AgentState {
  PolicyState active;
  ShareBuffer buffer;
  PolicyState local;
  std::vector<int> neighbors;  ///< sorted, always contains the agent itself
  int active_through = 0;      ///< newest source round fully merged into `active`

  AgentState(int V, int d);
};

struct Observation {
  Vec x;
  double r = 0.0;
};

/**
 * Delay budget D(t) = ceil(mult · log_base(V^{3/2} t)) and τ(t) = max(0, t − D(t)).
 * A lone agent has nobody to mix with, so its budget is always 0.
 */
class DelaySchedule {
 public:
  explicit DelaySchedule(int V, double multiplier = 4.0, double log_base = 2.0);
  int budget(int t) const;
  int tau(int t) const;
  int agents() const noexcept { return V_; }

 private:
  int V_;
  double multiplier_;
  double log_base_;
};

/// D(t) under the default schedule (multiplier 4, base 2).
int delay_budget(int t, int V);

using Permutation = std::vector<int>;

/// Independent uniform permutation inside every group; groups must
/// partition {0..V-1}. Fixed points are allowed.
Permutation draw_permutation(Rng& rng, const std::vector<std::vector<int>>& groups, int V);

/// All agent states of one simulation plus protocol-private state.
struct Network {
  Protocol protocol;
  int V;
  int d;
  DelaySchedule schedule;
  std::vector<AgentState> agents;
  std::optional<WeightTrace> weights;

  std::deque<std::vector<Observation>> recent;  ///< round robin: last V rounds, newest last
  std::deque<std::pair<int, std::vector<Observation>>> pending;  ///< delayed: rounds not yet released

  Network(Protocol protocol, int V, int d, DelaySchedule schedule);

  /// Turns on exact weight tracking (dcb and dccb only).
  void track_weights(int horizon);
};

// Building blocks shared by the gossip and clustering protocols. All of them
// keep the weight trace, when enabled, in lockstep with the matrices.

/// Agent i's buffer becomes the slotwise mean of its round-start buffer and
/// that of partner[i] (no-op where partner[i] == i).
void average_buffers(Network& net, const std::vector<int>& partner);
/// Appends (scale·xxᵀ, scale·r·x) as the newest entry of agent i's buffer.
void append_observation(Network& net, int i, const Observation& obs, double scale, int t);
/// Moves oldest entries into the active state until at most `budget` remain.
void flush_to_budget(Network& net, int i, int budget);

/// One gossip (DCB) round: average with σ(i), append V-scaled own data, flush to D(t).
void gossip_round(Network& net, const Permutation& sigma, std::span<const Observation> obs, int t);

/// One round of any non-clustering protocol; obs holds one observation per agent.
/// Throws ConfigError for dccb, which is driven by dccb_round.
void step(Network& net, int t, std::span<const Observation> obs, const Permutation& sigma);

}  // namespace p2pbandit
