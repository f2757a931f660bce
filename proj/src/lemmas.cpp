#include "p2pbandit/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "p2pbandit/errors.hpp"

namespace p2pbandit {

namespace {

// Log-domain comparisons tolerate rounding in factorizations.
constexpr double kLogTolerance = 1e-8;

Vec random_in_ball(Rng& rng, int d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vec v(d);
  for (int k = 0; k < d; ++k) v[k] = n01(rng);
  const double norm = v.norm();
  if (norm == 0.0) return v;
  // Half the draws sit on the sphere, the rest inside the ball.
  const double radius = u01(rng) < 0.5 ? 1.0 : std::pow(u01(rng), 1.0 / d);
  return v * (radius / norm);
}

}  // namespace

void LemmaReport::record(double slack, double tolerance) {
  ++trials;
  if (slack < -tolerance) ++violations;
  worst_slack = std::min(worst_slack, slack);
}

void LemmaReport::merge(const LemmaReport& other) {
  trials += other.trials;
  violations += other.violations;
  worst_slack = std::min(worst_slack, other.worst_slack);
}

void check_weighted_design(LemmaReport& report, const Mat& weighted, const Mat& pooled, double weight_deviation,
                           const Vec& x) {
  const auto w = PsdAccumulator::from_matrix(weighted);
  const auto p = PsdAccumulator::from_matrix(pooled);
  report.record(weight_deviation + p.logdet() - w.logdet(), kLogTolerance);
  const double nw = w.weighted_norm_sq(x);
  const double np = p.weighted_norm_sq(x);
  if (nw > 0.0 && np > 0.0) report.record(weight_deviation + std::log(np) - std::log(nw), kLogTolerance);
}

LemmaReport check_weighted_design(std::span<const Vec> ys, std::span<const double> weights, const Vec& x) {
  if (ys.size() != weights.size()) throw InputError("check_weighted_design: one weight per vector required");
  if (ys.empty()) throw InputError("check_weighted_design: empty data");
  const int d = static_cast<int>(ys.front().size());
  Mat weighted = Mat::Identity(d, d);
  Mat pooled = Mat::Identity(d, d);
  double deviation = 0.0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (weights[k] < 0.0) throw InputError("check_weighted_design: weights must be nonnegative");
    weighted += weights[k] * ys[k] * ys[k].transpose();
    pooled += ys[k] * ys[k].transpose();
    deviation += std::abs(weights[k] - 1.0);
  }
  LemmaReport report{"det_weight"};
  check_weighted_design(report, weighted, pooled, deviation, x);
  return report;
}

DetWeightMonitor::DetWeightMonitor(Simulation& sim) : report_(std::make_shared<LemmaReport>()) {
  report_->lemma_id = "det_weight";
  if (!sim.network().weights) throw PreconditionError("det_weight: weight tracking is not enabled");
  if (sim.config().protocol != Protocol::kDcb) throw PreconditionError("det_weight: needs a dcb run");
  const int d = sim.config().d;
  // prefix[r] = I + all data of rounds 1..r.
  auto prefix = std::make_shared<std::vector<Mat>>(1, Mat::Identity(d, d));
  sim.on_decisions([report = report_, prefix](const Simulation& s, int t, std::span<const Observation> obs) {
    const Network& net = s.network();
    const WeightTrace& wt = *net.weights;
    for (int i = 0; i < net.V; ++i) {
      const AgentState& a = net.agents[i];
      const int tau = a.active_through;
      double deviation = 0.0;
      for (int r = 1; r <= tau; ++r)
        for (int src = 0; src < net.V; ++src) deviation += std::abs(wt.active_weight(i, src, r) - 1.0);
      check_weighted_design(*report, a.active.A.matrix(), (*prefix)[static_cast<std::size_t>(tau)], deviation,
                            obs[i].x);
    }
    Mat next = prefix->back();
    for (const auto& o : obs) next += o.x * o.x.transpose();
    prefix->push_back(std::move(next));
    (void)t;
  });
}

LemmaReport check_det_weight_bound(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.track_weights = true;
  Simulation sim(c);
  DetWeightMonitor monitor(sim);
  sim.run();
  return monitor.report();
}

double outlier_bound(int d, double c, double trace_inv_b0) { return (d + c) * d * (trace_inv_b0 - c) / (c * c); }

LemmaReport check_outlier_count(const PsdAccumulator& b0, std::span<const Vec> ys, double c) {
  const double tr = b0.trace_inverse();
  if (!(c > 0.0 && c < 1.0 && c < tr)) throw InputError("check_outlier_count: c must lie in (0, min(1, tr B0^-1))");
  PsdAccumulator b = b0;
  long long count = 0;
  for (const auto& y : ys) {
    if (y.norm() > 1.0 + 1e-12) throw InputError("check_outlier_count: vectors must have norm <= 1");
    if (b.weighted_norm_sq(y) > c) ++count;
    b.rank_one_update(y);
  }
  LemmaReport report{"outlier_count"};
  report.record(outlier_bound(b0.dim(), c, tr) - static_cast<double>(count));
  return report;
}

LemmaReport DelayBiasReport::combined() const {
  LemmaReport out{"delay_bias"};
  out.merge(det);
  out.merge(norm);
  out.merge(outliers);
  return out;
}

DelayBiasReport check_delay_bias(const PsdAccumulator& b0, std::span<const Vec> ys,
                                 const std::function<long long(long long)>& tau,
                                 const std::function<double(long long)>& nu) {
  const auto n = static_cast<long long>(ys.size());
  // Prefix matrices, their log-determinants and the two per-step leverages
  // s_k = ‖y_k‖²_{B_{k−1}⁻¹} and u_k = ‖y_k‖²_{B_k⁻¹} = s_k / (1 + s_k).
  std::vector<PsdAccumulator> prefix{b0};
  std::vector<double> logdet{b0.logdet()};
  std::vector<double> sum_s{0.0}, sum_u{0.0};
  prefix.reserve(static_cast<std::size_t>(n + 1));
  for (const auto& y : ys) {
    if (y.norm() > 1.0 + 1e-12) throw InputError("check_delay_bias: vectors must have norm <= 1");
    PsdAccumulator next = prefix.back();
    const double s = next.weighted_norm_sq(y);
    next.rank_one_update(y);
    prefix.push_back(std::move(next));
    logdet.push_back(logdet.back() + std::log1p(s));
    sum_s.push_back(sum_s.back() + s);
    sum_u.push_back(sum_u.back() + s / (1.0 + s));
  }

  DelayBiasReport out;
  out.det.lemma_id = "delay_bias_det";
  out.norm.lemma_id = "delay_bias_norm";
  out.outliers.lemma_id = "delay_outliers";
  long long outliers = 0;
  for (long long t = 1; t <= n; ++t) {
    const long long tt = tau(t);
    if (tt < 0 || tt > t) throw InputError("check_delay_bias: tau(t) must lie in [0, t]");
    const auto ut = static_cast<std::size_t>(t);
    const auto ui = static_cast<std::size_t>(tt);
    const Vec& y = ys[ut - 1];

    out.det.record(sum_u[ut] - sum_u[ui] + logdet[ut] - logdet[ui], kLogTolerance);

    const double delayed_norm = prefix[ui].weighted_norm_sq(y);
    const double current_norm = prefix[ut].weighted_norm_sq(y);
    if (delayed_norm > 0.0 && current_norm > 0.0)
      out.norm.record(sum_s[ut] - sum_s[ui] + std::log(current_norm) - std::log(delayed_norm), kLogTolerance);

    // Outlier: the delayed matrix is more than a factor e away from the
    // up-to-date one, either in this direction or in volume.
    const double previous_norm = prefix[ut - 1].weighted_norm_sq(y);
    const bool norm_outlier = delayed_norm >= std::numbers::e * previous_norm && previous_norm > 0.0;
    const bool det_outlier = logdet[ut - 1] - logdet[ui] >= 1.0;
    if (norm_outlier || det_outlier) ++outliers;
    out.outliers.record(nu(t) - static_cast<double>(outliers));
  }
  return out;
}

DelayBiasReport check_delay_bias_run(const RunConfig& cfg) {
  if (cfg.protocol != Protocol::kDcb) throw PreconditionError("delay_bias: needs a dcb run");
  Simulation sim(cfg);
  const int V = cfg.V;
  const int d = cfg.d;
  auto ys = std::make_shared<std::vector<Vec>>();
  auto delayed = std::make_shared<std::vector<long long>>();
  sim.on_decisions([ys, delayed, V](const Simulation& s, int, std::span<const Observation> obs) {
    for (int i = 0; i < V; ++i) {
      ys->push_back(obs[i].x);
      delayed->push_back(static_cast<long long>(s.network().agents[i].active_through) * V);
    }
  });
  sim.run();
  const double trace_a0 = d;
  return check_delay_bias(
      PsdAccumulator(d), *ys, [&](long long k) { return (*delayed)[static_cast<std::size_t>(k - 1)]; },
      [&](long long k) {
        const double round = static_cast<double>((k - 1) / V + 1);
        const double inner = 4.0 * V * std::log(std::pow(static_cast<double>(V), 1.5) * round);
        return inner * inner * inner * (d + 1.0) * d * (trace_a0 + 1.0);
      });
}

DelayBiasReport check_delay_bias_random(int sequences, int n, int d, std::uint64_t seed) {
  DelayBiasReport total;
  total.det.lemma_id = "delay_bias_det";
  total.norm.lemma_id = "delay_bias_norm";
  total.outliers.lemma_id = "delay_outliers";
  auto tau = [](long long t) {
    const auto lag = static_cast<long long>(std::ceil(4.0 * std::log2(static_cast<double>(t))));
    return std::max<long long>(1, t - lag);
  };
  auto nu = [d](long long t) {
    const double inner = 4.0 * std::log(static_cast<double>(t));
    return inner * inner * inner * (d + 1.0) * d * (d + 1.0);
  };
  for (int s = 0; s < sequences; ++s) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(d), StreamTag::kTest);
    std::vector<Vec> ys;
    ys.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) ys.push_back(random_in_ball(rng, d));
    const DelayBiasReport r = check_delay_bias(PsdAccumulator(d), ys, tau, nu);
    total.det.merge(r.det);
    total.norm.merge(r.norm);
    total.outliers.merge(r.outliers);
  }
  return total;
}

CoverageResult check_coverage(const RunConfig& cfg, std::span<const int> checkpoints, int runs) {
  if (runs < 1) throw InputError("check_coverage: runs must be >= 1");
  if (checkpoints.empty()) throw InputError("check_coverage: no checkpoints");
  const int last = *std::max_element(checkpoints.begin(), checkpoints.end());
  long long inside = 0;
  long long total = 0;
  for (int run = 0; run < runs; ++run) {
    RunConfig c = cfg;
    c.seed = static_cast<std::uint64_t>(run);
    c.T = std::max(c.T, last);
    Simulation sim(c);
    while (sim.round() < last) {
      sim.step();
      if (std::find(checkpoints.begin(), checkpoints.end(), sim.round()) == checkpoints.end()) continue;
      for (int i = 0; i < c.V; ++i) {
        const PolicyState& state = sim.network().agents[i].active;
        const Vec diff = local_estimate(state) - sim.problem().theta_of(i);
        const double dist = std::sqrt(diff.dot(state.A.matrix() * diff));
        if (dist <= confidence_radius(state, sim.confidence())) ++inside;
        ++total;
      }
    }
  }
  CoverageResult out;
  out.report.lemma_id = "coverage";
  out.coverage = static_cast<double>(inside) / static_cast<double>(total);
  out.floor = 1.0 - cfg.delta - 3.0 * std::sqrt(cfg.delta * (1.0 - cfg.delta) / runs);
  out.report.trials = total;
  out.report.worst_slack = out.coverage - out.floor;
  out.report.violations = out.coverage < out.floor ? 1 : 0;
  return out;
}

void check_weight_sum(LemmaReport& report, const Simulation& sim) {
  const Network& net = sim.network();
  if (!net.weights) throw PreconditionError("weight_sum: weight tracking is not enabled");
  const WeightTrace& wt = *net.weights;
  const int V = net.V;
  const int t = sim.round();
  const double tol = 1e-9 * V;

  report.record(wt.min_weight());

  std::vector<std::vector<double>> held;
  held.reserve(static_cast<std::size_t>(V));
  for (int i = 0; i < V; ++i) held.push_back(wt.holdings(i));

  if (net.protocol == Protocol::kDcb) {
    for (int r = 1; r <= t; ++r) {
      for (int src = 0; src < V; ++src) {
        const auto key = static_cast<std::size_t>((r - 1) * V + src);
        double sum = 0.0;
        for (int i = 0; i < V; ++i) sum += held[i][key];
        report.record(tol - std::abs(sum - V));
      }
    }
    for (int i = 0; i < V; ++i)
      for (int r = 1; r <= net.agents[i].active_through; ++r)
        report.record(tol - std::abs(wt.active_source_sum(i, r) - V));
  } else {
    const ClusterProblem& p = sim.problem();
    for (int i = 0; i < V; ++i) {
      const auto& members = p.clusters[p.cluster_of[i]].members;
      if (net.agents[i].neighbors != members) continue;
      double outside = 0.0;
      for (int r = 1; r <= t; ++r)
        for (int src = 0; src < V; ++src)
          if (p.cluster_of[src] != p.cluster_of[i]) outside += std::abs(held[i][(r - 1) * V + src]);
      report.record(-outside);
    }
  }
}

LemmaReport check_weight_sum(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.track_weights = true;
  Simulation sim(c);
  LemmaReport report{"weight_sum"};
  while (!sim.done()) {
    sim.step();
    check_weight_sum(report, sim);
  }
  return report;
}

VarianceDecay check_weight_variance(int V, int T, int runs, std::uint64_t seed) {
  if (runs < 2) throw InputError("check_weight_variance: needs at least two runs");
  RunConfig cfg;
  cfg.protocol = Protocol::kDcb;
  cfg.V = V;
  cfg.T = T;
  cfg.d = 2;
  cfg.m = 2;
  cfg.track_weights = true;
  // per_run[lag][run]
  std::vector<std::vector<double>> per_run(static_cast<std::size_t>(T), std::vector<double>(runs, 0.0));
  std::vector<long long> samples(static_cast<std::size_t>(T), 0);
  for (int run = 0; run < runs; ++run) {
    cfg.seed = seed + static_cast<std::uint64_t>(run);
    Simulation sim(cfg);
    std::vector<double> sum(static_cast<std::size_t>(T), 0.0);
    std::vector<long long> count(static_cast<std::size_t>(T), 0);
    while (!sim.done()) {
      sim.step();
      const int t = sim.round();
      for (int i = 0; i < V; ++i) {
        const auto held = sim.network().weights->holdings(i);
        for (int r = 1; r <= t; ++r)
          for (int src = 0; src < V; ++src) {
            const double dev = held[(r - 1) * V + src] - 1.0;
            sum[t - r] += dev * dev;
            ++count[t - r];
          }
      }
    }
    for (int lag = 0; lag < T; ++lag) per_run[lag][run] = sum[lag] / static_cast<double>(count[lag]);
  }
  VarianceDecay out;
  out.report.lemma_id = "weight_variance";
  for (int lag = 0; lag < T; ++lag) {
    const auto& xs = per_run[lag];
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= runs;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (runs - 1);
    const double se = std::sqrt(var / runs);
    out.mean.push_back(mean);
    out.stderr_.push_back(se);
    out.report.record(V / std::pow(2.0, lag) + 3.0 * se - mean);
  }
  return out;
}

std::vector<std::string> suite_ids() {
  return {"weight_sum", "det_weight", "outlier_count", "delay_bias", "coverage", "weight_variance"};
}

namespace {

RunConfig dcb_config(int V, int d, int T, std::uint64_t seed) {
  RunConfig c;
  c.protocol = Protocol::kDcb;
  c.V = V;
  c.d = d;
  c.T = T;
  c.seed = seed;
  return c;
}

std::vector<LemmaReport> run_one(const std::string& id) {
  if (id == "weight_sum") {
    LemmaReport r{"weight_sum"};
    r.merge(check_weight_sum(dcb_config(4, 3, 500, 0)));
    r.merge(check_weight_sum(dcb_config(1, 3, 100, 1)));
    RunConfig dccb = dcb_config(8, 2, 1000, 2);
    dccb.protocol = Protocol::kDccb;
    dccb.clusters = {4, 4};
    dccb.thresh_coef = 1.0;
    r.merge(check_weight_sum(dccb));
    return {r};
  }
  if (id == "det_weight") {
    LemmaReport r{"det_weight"};
    for (int V : {2, 4}) r.merge(check_det_weight_bound(dcb_config(V, 3, 500, static_cast<std::uint64_t>(V))));
    // Arbitrary nonnegative weights, including heavy ones.
    Rng rng = make_stream(7, 0, 0, StreamTag::kTest);
    std::uniform_real_distribution<double> w(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 2 + trial % 4;
      std::vector<Vec> ys;
      std::vector<double> ws;
      for (int k = 0; k < 30; ++k) {
        ys.push_back(random_in_ball(rng, d));
        ws.push_back(trial % 2 ? 2.0 : w(rng));
      }
      r.merge(check_weighted_design(ys, ws, random_in_ball(rng, d)));
    }
    return {r};
  }
  if (id == "outlier_count") {
    LemmaReport r{"outlier_count"};
    for (int d : {2, 5})
      for (double c : {0.1, 0.5, 0.9}) {
        Rng rng = make_stream(11, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(c * 10), StreamTag::kTest);
        for (int trial = 0; trial < 1000; ++trial) {
          std::vector<Vec> ys;
          for (int k = 0; k < 200; ++k) ys.push_back(random_in_ball(rng, d));
          r.merge(check_outlier_count(PsdAccumulator(d), ys, c));
        }
      }
    return {r};
  }
  if (id == "delay_bias") {
    DelayBiasReport total;
    for (int V : {2, 4}) {
      const DelayBiasReport run = check_delay_bias_run(dcb_config(V, 3, 500, 20 + static_cast<std::uint64_t>(V)));
      total.det.merge(run.det);
      total.norm.merge(run.norm);
      total.outliers.merge(run.outliers);
    }
    const DelayBiasReport random = check_delay_bias_random(200, 500, 3, 13);
    total.det.merge(random.det);
    total.norm.merge(random.norm);
    total.outliers.merge(random.outliers);
    total.det.lemma_id = "delay_bias_det";
    total.norm.lemma_id = "delay_bias_norm";
    total.outliers.lemma_id = "delay_outliers";
    return {total.det, total.norm, total.outliers};
  }
  if (id == "coverage") {
    const std::vector<int> checkpoints{50, 200};
    return {check_coverage(dcb_config(4, 3, 200, 0), checkpoints, 200).report};
  }
  if (id == "weight_variance") return {check_weight_variance(4, 16, 500, 100).report};
  throw ConfigError("unknown lemma suite '" + id + "'");
}

}  // namespace

std::vector<LemmaReport> run_suite(const std::string& id) {
  if (id != "all") return run_one(id);
  std::vector<LemmaReport> out;
  for (const auto& s : suite_ids()) {
    auto part = run_one(s);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace p2pbandit
