#pragma once

#include <cstdint>
#include <vector>

#include "p2pbandit/linalg.hpp"
#include "p2pbandit/rng.hpp"

namespace p2pbandit {

/// The m actions offered to one agent in one round; every vector has norm ≤ 1.
using ContextSet = std::vector<Vec>;

struct Cluster {
  std::vector<int> members;
  Vec theta;
};

/// Clustered linear bandit instance. Agents are 0-based; clusters partition
/// {0..V-1} and their parameters are pairwise at least `gamma` apart.
struct ClusterProblem {
  int V = 0;
  int d = 0;
  std::vector<Cluster> clusters;
  std::vector<int> cluster_of;  ///< agent -> cluster index
  double gamma = 0.0;           ///< realized minimum pairwise distance (0 for one cluster)
  double lambda = 0.0;          ///< min eigenvalue of E[xxᵀ]
  int m = 0;
  double R = 0.0;
  double S = 0.0;

  const Vec& theta_of(int agent) const { return clusters[cluster_of[agent]].theta; }
};

struct ProblemSpec {
  std::vector<int> cluster_sizes;
  int d = 5;
  int m = 10;
  double R = 0.5;
  double S = 1.0;
  double gamma = 0.0;  ///< required separation; ignored for a single cluster
  std::uint64_t seed = 0;
  int max_attempts = 10000;
};

/// m i.i.d. vectors uniform on the unit sphere of R^d, so E[xxᵀ] = I/d.
ContextSet sample_context_set(Rng& rng, int m, int d);

/// x·θ + ξ with ξ ~ N(0, R²).
double reward(const Vec& x, const Vec& theta, double R, Rng& rng);

/// Draws cluster parameters on the sphere of radius S, resampling the whole
/// set until every pair is at least gamma apart. Throws ConfigError when no
/// feasible draw is found within max_attempts.
ClusterProblem make_cluster_problem(const ProblemSpec& spec);

}  // namespace p2pbandit
