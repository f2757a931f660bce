#pragma once

#include <cstddef>

#include "p2pbandit/bandit_env.hpp"
#include "p2pbandit/linalg.hpp"

namespace p2pbandit {

struct ConfidenceParams {
  double delta = 0.1;
  double R = 0.5;
  double S = 1.0;
  double logdet0 = 0.0;  ///< log det of the prior matrix; 0 for the identity
};

/// Design matrix and response vector an agent decides from.
struct PolicyState {
  PsdAccumulator A;
  Vec b;

  explicit PolicyState(int d) : A(d), b(Vec::Zero(d)) {}

  void observe(const Vec& x, double r, double weight = 1.0) {
    A.rank_one_update(x, weight);
    b += (weight * r) * x;
  }
};

/// Ellipsoid radius R·sqrt(2(½logdet A − ½logdet A₀ − ln δ)) + S.
/// The weight-imbalance inflation factor is taken as 1; it only matters to
/// the analysis.
double confidence_radius(const PolicyState& state, const ConfidenceParams& p);

struct ActionChoice {
  std::size_t index = 0;
  double score = 0.0;
};

/// Optimistic action: argmax over contexts of x·θ̂ + radius·‖x‖_{A⁻¹},
/// which is the joint argmax over (x, θ) ∈ contexts × ellipsoid.
/// Ties go to the lowest index.
ActionChoice select_action(const ContextSet& contexts, const PolicyState& state, double radius);

/// Ridge estimate A⁻¹b.
Vec local_estimate(const PolicyState& state);

}  // namespace p2pbandit
