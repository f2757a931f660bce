#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "p2pbandit/sharing.hpp"

namespace p2pbandit {

struct ThresholdParams {
  double lambda = 0.2;  ///< min eigenvalue of E[xxᵀ]
  double delta = 0.1;
  double R = 0.5;
  int d = 5;
  /// Coefficient of the λt term in A_λ. Unset means 1/δ.
  std::optional<double> growth_coef;
};

/// A_λ(t, δ) = c·λt − 8 ln((t+3)/δ) − 2·sqrt(t·ln((t+3)/δ)) with c = 1/δ
/// unless overridden.
double a_lambda(int t, double delta, double lambda, std::optional<double> growth_coef = std::nullopt);

/// (R·sqrt(2d ln t + 2 ln(2/δ)) + 1) / sqrt(1 + max{A_λ(t, δ/(4d)), 0}).
double threshold(int t, const ThresholdParams& p);

/// Strictly greater than: estimates exactly c apart are kept together.
bool should_prune(const Vec& theta_i, const Vec& theta_j, double c);

struct PruneEvent {
  int round = 0;
  int agent_a = 0;
  int agent_b = 0;
  double distance = 0.0;
  double threshold = 0.0;
};

/// Agent i falls back to its own lifetime data: active := local, buffer :=
/// `pad` zero entries followed by (A_local − I, b_local).
void reset_to_local(Network& net, int i, std::size_t pad, int t);

/// Drops the edge i–j from both neighbor sets and resets both agents.
void prune_and_reset(Network& net, int i, int j, std::size_t pad, int t);

/// Connected components of the current (mutual) neighbor graph, each sorted.
std::vector<std::vector<int>> contact_groups(const Network& net);

struct DccbRoundReport {
  std::vector<PruneEvent> prunes;
  std::vector<std::pair<int, int>> shares;  ///< (i, σ(i)) pairs that averaged buffers
};

/**
 * One DCCB round. For each contact (i, σ(i)) with σ(i) still in i's
 * neighbor set, using round-start estimates and neighbor sets:
 *  - estimates further apart than the threshold: prune and reset both;
 *  - otherwise, equal neighbor sets: gossip as in DCB;
 *  - otherwise: append own observation only.
 * Every agent also folds its own observation into its local estimator.
 * Appended data is scaled by the size of the agent's neighbor set.
 */
DccbRoundReport dccb_round(Network& net, const Permutation& sigma, std::span<const Observation> obs, int t,
                           const ThresholdParams& params);

}  // namespace p2pbandit
