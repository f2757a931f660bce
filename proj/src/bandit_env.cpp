#include "p2pbandit/bandit_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

namespace {

Vec unit_sphere(Rng& rng, int d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec v(d);
  for (;;) {
    for (int k = 0; k < d; ++k) v[k] = n01(rng);
    const double norm = v.norm();
    if (norm > 0.0) return v / norm;
  }
}

}  // namespace

ContextSet sample_context_set(Rng& rng, int m, int d) {
  if (m < 1 || d < 1) throw InputError("sample_context_set: m and d must be >= 1");
  ContextSet out;
  out.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) out.push_back(unit_sphere(rng, d));
  return out;
}

double reward(const Vec& x, const Vec& theta, double R, Rng& rng) {
  if (x.size() != theta.size()) throw InputError("reward: dimension mismatch");
  const double mean = x.dot(theta);
  if (R == 0.0) return mean;
  std::normal_distribution<double> noise(0.0, R);
  return mean + noise(rng);
}

ClusterProblem make_cluster_problem(const ProblemSpec& spec) {
  if (spec.cluster_sizes.empty()) throw ConfigError("cluster sizes must be nonempty");
  if (spec.d < 1 || spec.m < 1) throw ConfigError("d and m must be >= 1");
  for (int s : spec.cluster_sizes)
    if (s < 1) throw ConfigError("every cluster needs at least one agent");
  const int k = static_cast<int>(spec.cluster_sizes.size());
  if (k > 1 && !(spec.gamma > 0.0)) throw ConfigError("gamma must be > 0 with more than one cluster");

  ClusterProblem p;
  p.V = std::accumulate(spec.cluster_sizes.begin(), spec.cluster_sizes.end(), 0);
  p.d = spec.d;
  p.m = spec.m;
  p.R = spec.R;
  p.S = spec.S;
  p.lambda = 1.0 / spec.d;

  Rng rng = make_stream(spec.seed, 0, 0, StreamTag::kProblem);
  std::vector<Vec> thetas;
  double min_dist = 0.0;
  bool ok = false;
  for (int attempt = 0; attempt < spec.max_attempts && !ok; ++attempt) {
    thetas.clear();
    for (int c = 0; c < k; ++c) thetas.push_back(spec.S * unit_sphere(rng, spec.d));
    min_dist = k > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) min_dist = std::min(min_dist, (thetas[a] - thetas[b]).norm());
    ok = k == 1 || min_dist >= spec.gamma;
  }
  if (!ok) throw ConfigError("could not draw cluster parameters with the requested separation gamma");

  int next = 0;
  p.cluster_of.assign(static_cast<std::size_t>(p.V), 0);
  for (int c = 0; c < k; ++c) {
    Cluster cl;
    cl.theta = thetas[c];
    for (int j = 0; j < spec.cluster_sizes[c]; ++j) {
      cl.members.push_back(next);
      p.cluster_of[next] = c;
      ++next;
    }
    p.clusters.push_back(std::move(cl));
  }
  p.gamma = min_dist;
  return p;
}

}  // namespace p2pbandit
