#pragma once

#include <cstddef>
#include <cstdint>

#include "p2pbandit/bandit_env.hpp"
#include "p2pbandit/sharing.hpp"

namespace p2pbandit {

/// Network-aggregate accounting for one round.
struct RoundMetrics {
  int round = 0;
  double regret_round = 0.0;  ///< Σ_i ρ_t^i
  double cum_regret = 0.0;
  std::uint64_t comm_bits_round = 0;
  std::uint64_t comm_bits_cum = 0;
  double clusters_discovered_frac = 0.0;
};

/// max_{x∈contexts} x·θ − chosen·θ. Throws InputError if `chosen` is not
/// (exactly) one of the contexts.
double instantaneous_regret(const ContextSet& contexts, const Vec& theta, const Vec& chosen);
double instantaneous_regret(const ContextSet& contexts, const Vec& theta, std::size_t chosen_index);

/**
 * Bits put on the wire in one round:
 *   nosharing            0
 *   instsharing/delayed  V(V−1)(d+1)·b
 *   roundrobin           V·V(d+1)·b
 *   dcb                  V·L·(d²+d)·b
 *   dccb                 V·L·(d²+d)·b + V·d·b
 * where L is the buffer length exchanged and b the bits per scalar.
 */
std::uint64_t comm_bits(Protocol p, int t, int V, int d, std::size_t buffer_length, int scalar_bits = 64);

// Closed-form regret bounds. All logarithms are natural unless the name says
// otherwise; ln((1+n/d)^d) is evaluated as d·log1p(n/d).

/// √3 / ((1 − 2^{−1/4})·√δ)
double mixing_constant(double delta);
/// (d+1)·d²·(4V·ln(V^{3/2}t))³
double delay_penalty(int V, int d, double t);
/// R·sqrt(ln((1+Vt/d)^d/δ)) + S
double dcb_beta(double t, int V, int d, double delta, double R, double S);

/// (N(δ)V + ν(V,d,t))·S + 4e²(β(t)+4R)·sqrt(Vt·ln((1+Vt/d)^d))
double bound_dcb(double t, int V, int d, double delta, double R, double S);

/// V·β₁(t)·sqrt(t·ln((1+t/d)^d)) with the single-agent β₁.
double bound_nosharing(double t, int V, int d, double delta, double R, double S);

/// Δ³(d + 1/Δ)·d·(tr(A₀⁻¹) − 1/Δ) with Δ = V·delay and A₀ = I; 0 when Δ = 0.
double delayed_penalty(int V, int d, int delay);

/// e^{1/2}(β(t) + R√2)·sqrt(Vt·ln(det A_t/det A₀)) + ν·S, where the log-det
/// ratio is replaced by its upper bound ln((1+Vt/d)^d).
double bound_delayed(double t, int V, int d, double delta, double R, double S, int delay);

/// Same bound with the measured ln(det A_t / det A₀) of a run.
double bound_delayed_trace(double t, int V, int d, double delta, double R, double S, int delay,
                           double logdet_ratio);

/// Per-cluster bound with discovery time C measured from a run:
/// [max{√2·N(δ), C + 4log₂(V^{3/2}C)}·|U| + ν(|U|,d,t)]·S
///   + 4e(β(t) + 3R)·sqrt(|U|t·ln((1+|U|t/d)^d)),  β(t) = R·sqrt(2ln((1+|U|t/d)^d)) + S.
/// The C-branch is dropped when C ≤ 0.
double bound_dccb(double t, int cluster_size, int V, int d, double delta, double R, double S,
                  double discovery);

}  // namespace p2pbandit
