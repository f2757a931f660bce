#pragma once

#include <functional>
#include <memory>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "p2pbandit/config.hpp"
#include "p2pbandit/linalg.hpp"
#include "p2pbandit/simulation.hpp"

namespace p2pbandit {

/// Outcome of one numerical check. Slack is bound minus observed, so a
/// negative slack beyond the check's tolerance is a violation.
struct LemmaReport {
  std::string lemma_id;
  long long trials = 0;
  long long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();

  void record(double slack, double tolerance = 0.0);
  void merge(const LemmaReport& other);
  bool passed() const noexcept { return violations == 0; }
};

// --- Influence of general weights on the design matrix ---

/// Checks det(weighted) ≤ e^W det(pooled) and ‖x‖²_{weighted⁻¹} ≤ e^W ‖x‖²_{pooled⁻¹}
/// (both in log form) where W = Σ|w − 1|.
void check_weighted_design(LemmaReport& report, const Mat& weighted, const Mat& pooled, double weight_deviation,
                           const Vec& x);

/// Same, building I + Σ w_k y_k y_kᵀ and I + Σ y_k y_kᵀ from the data.
LemmaReport check_weighted_design(std::span<const Vec> ys, std::span<const double> weights, const Vec& x);

/**
 * Attached to a DCB simulation with weight tracking: at every decision of
 * every agent compares its active matrix with the pooled matrix of all data
 * up to the same round, using the tracked weights.
 */
class DetWeightMonitor {
 public:
  /// Throws PreconditionError unless the simulation tracks weights and runs dcb.
  explicit DetWeightMonitor(Simulation& sim);
  const LemmaReport& report() const noexcept { return *report_; }

 private:
  std::shared_ptr<LemmaReport> report_;
};

/// Runs the config (dcb, weights tracked) and checks every decision.
LemmaReport check_det_weight_bound(const RunConfig& cfg);

// --- Outlier counting ---

/// (d + c)·d·(tr(B₀⁻¹) − c)/c²
double outlier_bound(int d, double c, double trace_inv_b0);

/// Counts k with ‖y_k‖²_{B_{k−1}⁻¹} > c and compares with outlier_bound.
/// Requires ‖y_k‖ ≤ 1 and c ∈ (0, min(1, tr(B₀⁻¹))).
LemmaReport check_outlier_count(const PsdAccumulator& b0, std::span<const Vec> ys, double c);

// --- Bias from delayed data ---

struct DelayBiasReport {
  LemmaReport det;       ///< det(B_τ) ≤ exp(Σ_{τ<k≤t} ‖y_k‖²_{B_k⁻¹}) det(B_t)
  LemmaReport norm;      ///< ‖y_t‖²_{B_τ⁻¹} ≤ exp(Σ_{τ<k≤t} ‖y_k‖²_{B_{k−1}⁻¹}) ‖y_t‖²_{B_t⁻¹}
  LemmaReport outliers;  ///< #{k ≤ t : B_τ(k) is more than a factor e off} ≤ ν(t)
  LemmaReport combined() const;
};

/// tau and nu take 1-based sequence indices; 0 ≤ τ(t) ≤ t.
DelayBiasReport check_delay_bias(const PsdAccumulator& b0, std::span<const Vec> ys,
                                 const std::function<long long(long long)>& tau,
                                 const std::function<double(long long)>& nu);

/// Observations of a DCB run in (round, agent) order with the delay the
/// agents actually used, checked against ν(V, d, round).
DelayBiasReport check_delay_bias_run(const RunConfig& cfg);

/// `sequences` random unit-ball sequences of length n with
/// τ(t) = max(1, t − ⌈4 log₂ t⌉) and the single-agent ν.
DelayBiasReport check_delay_bias_random(int sequences, int n, int d, std::uint64_t seed);

// --- Confidence ball coverage ---

/// Share of (run, checkpoint, agent) triples with ‖θ̂ − θ‖_Ã ≤ radius over
/// seeds 0..runs−1. `violations` is 1 when the share falls below
/// 1 − δ − 3·sqrt(δ(1−δ)/runs); worst_slack is share minus that floor.
struct CoverageResult {
  LemmaReport report;
  double coverage = 0.0;
  double floor = 0.0;
};
CoverageResult check_coverage(const RunConfig& cfg, std::span<const int> checkpoints, int runs);

// --- Weight bookkeeping ---

/// Inspects the simulation's weight trace after a round: per-datum totals and
/// flushed per-round source sums equal V (dcb), all weights are nonnegative,
/// and an agent whose neighbor set is its true cluster holds nothing from
/// outside it (dccb). Throws PreconditionError without tracking.
void check_weight_sum(LemmaReport& report, const Simulation& sim);

/// Runs the config checking after every round.
LemmaReport check_weight_sum(const RunConfig& cfg);

/// Mean of (w − 1)² by lag t − t′ over holders, sources and runs, against
/// V/2^lag plus three standard errors across runs.
struct VarianceDecay {
  std::vector<double> mean;   ///< by lag
  std::vector<double> stderr_;
  LemmaReport report;
};
VarianceDecay check_weight_variance(int V, int T, int runs, std::uint64_t seed);

// --- Suites used by `verify` ---

std::vector<std::string> suite_ids();
/// Runs one suite ("all" runs every suite). Throws ConfigError on an unknown id.
std::vector<LemmaReport> run_suite(const std::string& id);

}  // namespace p2pbandit
