#include "p2pbandit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

double instantaneous_regret(const ContextSet& contexts, const Vec& theta, std::size_t chosen_index) {
  if (chosen_index >= contexts.size()) throw InputError("instantaneous_regret: chosen index out of range");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : contexts) best = std::max(best, x.dot(theta));
  return std::max(0.0, best - contexts[chosen_index].dot(theta));
}

double instantaneous_regret(const ContextSet& contexts, const Vec& theta, const Vec& chosen) {
  for (std::size_t k = 0; k < contexts.size(); ++k) {
    if (contexts[k].size() == chosen.size() && contexts[k] == chosen)
      return instantaneous_regret(contexts, theta, k);
  }
  throw InputError("instantaneous_regret: chosen action is not in the context set");
}

std::uint64_t comm_bits(Protocol p, int t, int V, int d, std::size_t buffer_length, int scalar_bits) {
  if (t < 1) throw InputError("comm_bits: round must be >= 1");
  const auto v = static_cast<std::uint64_t>(V);
  const auto dd = static_cast<std::uint64_t>(d);
  const auto b = static_cast<std::uint64_t>(scalar_bits);
  const auto len = static_cast<std::uint64_t>(buffer_length);
  switch (p) {
    case Protocol::kNoSharing: return 0;
    case Protocol::kInstSharing:
    case Protocol::kDelayed: return v * (v - 1) * (dd + 1) * b;
    case Protocol::kRoundRobin: return v * v * (dd + 1) * b;
    case Protocol::kDcb: return v * len * (dd * dd + dd) * b;
    case Protocol::kDccb: return v * len * (dd * dd + dd) * b + v * dd * b;
  }
  throw ConfigError("comm_bits: unknown protocol");
}

namespace {

double log_det_proxy(double n, int d) { return d * std::log1p(n / d); }

}  // namespace

double mixing_constant(double delta) {
  return std::sqrt(3.0) / ((1.0 - std::pow(2.0, -0.25)) * std::sqrt(delta));
}

double delay_penalty(int V, int d, double t) {
  const double inner = 4.0 * V * std::log(std::pow(static_cast<double>(V), 1.5) * t);
  return (d + 1.0) * d * d * inner * inner * inner;
}

double dcb_beta(double t, int V, int d, double delta, double R, double S) {
  const double log_term = log_det_proxy(static_cast<double>(V) * t, d) - std::log(delta);
  return R * std::sqrt(std::max(log_term, 0.0)) + S;
}

double bound_dcb(double t, int V, int d, double delta, double R, double S) {
  const double e2 = std::exp(2.0);
  const double leading = 4.0 * e2 * (dcb_beta(t, V, d, delta, R, S) + 4.0 * R) *
                         std::sqrt(V * t * log_det_proxy(V * t, d));
  return (mixing_constant(delta) * V + delay_penalty(V, d, t)) * S + leading;
}

double bound_nosharing(double t, int V, int d, double delta, double R, double S) {
  return V * dcb_beta(t, 1, d, delta, R, S) * std::sqrt(t * log_det_proxy(t, d));
}

double delayed_penalty(int V, int d, int delay) {
  if (delay < 0) throw InputError("delayed_penalty: delay must be >= 0");
  const double big_delta = static_cast<double>(V) * delay;
  if (big_delta == 0.0) return 0.0;
  const double trace_inv = d;  // A₀ = I
  return big_delta * big_delta * big_delta * (d + 1.0 / big_delta) * d * (trace_inv - 1.0 / big_delta);
}

double bound_delayed_trace(double t, int V, int d, double delta, double R, double S, int delay,
                           double logdet_ratio) {
  const double beta = R * std::sqrt(std::max(logdet_ratio - 2.0 * std::log(delta), 0.0)) + S;
  const double leading = std::exp(0.5) * (beta + R * std::numbers::sqrt2) *
                         std::sqrt(V * t * std::max(logdet_ratio, 0.0));
  return leading + delayed_penalty(V, d, delay) * S;
}

double bound_delayed(double t, int V, int d, double delta, double R, double S, int delay) {
  return bound_delayed_trace(t, V, d, delta, R, S, delay, log_det_proxy(V * t, d));
}

double bound_dccb(double t, int cluster_size, int V, int d, double delta, double R, double S,
                  double discovery) {
  const double u = cluster_size;
  const double mixing = std::numbers::sqrt2 * mixing_constant(delta);
  double burn_in = mixing;
  if (discovery > 0.0) {
    const double discovery_branch =
        discovery + 4.0 * std::log2(std::pow(static_cast<double>(V), 1.5) * discovery);
    burn_in = std::max(mixing, discovery_branch);
  }
  const double log_det = log_det_proxy(u * t, d);
  const double beta = R * std::sqrt(2.0 * log_det) + S;
  const double leading = 4.0 * std::numbers::e * (beta + 3.0 * R) * std::sqrt(u * t * log_det);
  return (burn_in * u + delay_penalty(cluster_size, d, t)) * S + leading;
}

}  // namespace p2pbandit
