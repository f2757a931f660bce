#include "p2pbandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

double confidence_radius(const PolicyState& state, const ConfidenceParams& p) {
  const double log_term = 0.5 * state.A.logdet() - 0.5 * p.logdet0 - std::log(p.delta);
  return p.R * std::sqrt(2.0 * std::max(log_term, 0.0)) + p.S;
}

ActionChoice select_action(const ContextSet& contexts, const PolicyState& state, double radius) {
  if (contexts.empty()) throw InputError("select_action: empty context set");
  const Vec theta_hat = local_estimate(state);
  ActionChoice best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < contexts.size(); ++k) {
    const Vec& x = contexts[k];
    const double score = x.dot(theta_hat) + radius * std::sqrt(state.A.weighted_norm_sq(x));
    if (score > best.score) best = {k, score};
  }
  return best;
}

Vec local_estimate(const PolicyState& state) { return state.A.solve(state.b); }

}  // namespace p2pbandit
