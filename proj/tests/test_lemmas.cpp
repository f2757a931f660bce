#include <doctest.h>

#include <cmath>

#include "p2pbandit/errors.hpp"
#include "p2pbandit/lemmas.hpp"

using namespace p2pbandit;

namespace {

RunConfig dcb(int V, int d, int T, std::uint64_t seed) {
  RunConfig c;
  c.protocol = Protocol::kDcb;
  c.V = V;
  c.d = d;
  c.T = T;
  c.seed = seed;
  return c;
}

std::vector<Vec> ones_1d(int n) { return std::vector<Vec>(static_cast<std::size_t>(n), Vec::Ones(1)); }

}  // namespace

TEST_CASE("weighted design: unit weights give equality") {
  Rng rng = make_stream(1, 0, 0, StreamTag::kTest);
  const auto ys = sample_context_set(rng, 20, 3);
  const std::vector<double> w(20, 1.0);
  const auto r = check_weighted_design(ys, w, ys[0]);
  CHECK(r.passed());
  CHECK(std::abs(r.worst_slack) < 1e-8);
}

TEST_CASE("weighted design holds for injected heavy weights") {
  Rng rng = make_stream(2, 0, 0, StreamTag::kTest);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ys = sample_context_set(rng, 15, 2);
    std::vector<double> w(15, 2.0);
    if (trial % 2) for (auto& x : w) x = u(rng);
    CHECK(check_weighted_design(ys, w, sample_context_set(rng, 1, 2)[0]).passed());
  }
}

TEST_CASE("weighted design check on a small gossip run") {
  const auto r = check_det_weight_bound(dcb(2, 2, 50, 0));
  CHECK(r.trials > 0);
  CHECK(r.passed());
  RunConfig untracked = dcb(2, 2, 50, 0);
  Simulation sim(untracked);
  CHECK_THROWS_AS(DetWeightMonitor{sim}, PreconditionError);
}

TEST_CASE("outlier count, one-dimensional hand case") {
  // ‖y_k‖²_{B_{k−1}⁻¹} = 1/k, so only k = 1 exceeds 0.5; bound (1.5)(1)(0.5)/0.25 = 3.
  CHECK(outlier_bound(1, 0.5, 1.0) == doctest::Approx(3.0));
  const auto r = check_outlier_count(PsdAccumulator(1), ones_1d(50), 0.5);
  CHECK(r.passed());
  CHECK(r.worst_slack == doctest::Approx(2.0));
  CHECK_THROWS_AS(check_outlier_count(PsdAccumulator(1), ones_1d(3), 1.0), InputError);
}

TEST_CASE("outlier count on random sequences") {
  Rng rng = make_stream(3, 0, 0, StreamTag::kTest);
  for (int d : {2, 5})
    for (double c : {0.1, 0.5, 0.9})
      for (int trial = 0; trial < 50; ++trial)
        CHECK(check_outlier_count(PsdAccumulator(d), sample_context_set(rng, 200, d), c).passed());
}

TEST_CASE("delay bias without delay is tight") {
  Rng rng = make_stream(4, 0, 0, StreamTag::kTest);
  const auto ys = sample_context_set(rng, 60, 3);
  const auto r = check_delay_bias(PsdAccumulator(3), ys, [](long long t) { return t; }, [](long long) { return 0.0; });
  CHECK(r.combined().passed());
  CHECK(std::abs(r.det.worst_slack) < 1e-9);
}

TEST_CASE("delay bias, one-dimensional closed form") {
  // B_t = 1 + t; with τ(t) = t − 1 the determinant ratio is t/(t+1) ≤ exp(1/(t+1)).
  const auto r =
      check_delay_bias(PsdAccumulator(1), ones_1d(40), [](long long t) { return t - 1; }, [](long long) { return 1.0; });
  CHECK(r.det.passed());
  CHECK(r.norm.passed());
  for (int t = 1; t <= 40; ++t) CHECK(std::log(t / (t + 1.0)) <= 1.0 / (t + 1.0));
  CHECK(r.det.worst_slack == doctest::Approx(std::log(41.0 / 40.0) + 1.0 / 41.0).epsilon(1e-9));
}

TEST_CASE("the norm inequality needs the B_{k-1} exponent") {
  // The B_k-exponent form fails already at t = 1 with τ = 0:
  // ‖y‖²_{B_0⁻¹} = 1 but exp(‖y‖²_{B_1⁻¹})·‖y‖²_{B_1⁻¹} = e^{1/2}/2 < 1.
  CHECK(std::exp(0.5) / 2.0 < 1.0);
  const auto r =
      check_delay_bias(PsdAccumulator(1), ones_1d(1), [](long long) { return 0; }, [](long long) { return 1.0; });
  CHECK(r.norm.passed());  // with B_{k−1}: exp(1)·(1/2) ≥ 1
  CHECK(r.norm.worst_slack == doctest::Approx(1.0 + std::log(0.5)));
}

TEST_CASE("delay bias on gossip traces and random delayed sequences") {
  CHECK(check_delay_bias_run(dcb(4, 3, 200, 1)).combined().passed());
  CHECK(check_delay_bias_random(20, 300, 3, 5).combined().passed());
}

TEST_CASE("coverage") {
  const std::vector<int> cps{30, 80};
  const auto cov = check_coverage(dcb(4, 3, 80, 0), cps, 100);
  CHECK(cov.report.passed());
  CHECK(cov.coverage >= cov.floor);

  RunConfig half = dcb(4, 3, 80, 0);
  half.delta = 0.5;
  CHECK(check_coverage(half, cps, 100).report.passed());

  // Noiseless: the ridge bias ‖θ̂ − θ‖_A is at most ‖θ‖ ≤ S = radius.
  RunConfig quiet = dcb(4, 3, 80, 0);
  quiet.R = 0.0;
  const auto exact = check_coverage(quiet, cps, 100);
  CHECK(exact.coverage == 1.0);
}

TEST_CASE("weight sums") {
  CHECK(check_weight_sum(dcb(4, 3, 200, 2)).passed());
  CHECK(check_weight_sum(dcb(1, 3, 50, 2)).passed());

  RunConfig solo = dcb(1, 2, 20, 0);
  solo.track_weights = true;
  Simulation sim(solo);
  sim.run();
  for (int r = 1; r <= 20; ++r) CHECK(sim.network().weights->weight(0, 0, r) == 1.0);

  Simulation untracked(dcb(2, 2, 5, 0));
  LemmaReport rep;
  CHECK_THROWS_AS(check_weight_sum(rep, untracked), PreconditionError);
}

TEST_CASE("weight variance decays at least geometrically") {
  const auto v = check_weight_variance(4, 8, 300, 40);
  CHECK(v.report.passed());
  // Lag 0: the owner holds V and everyone else 0, so the mean is exactly V − 1.
  CHECK(v.mean[0] == doctest::Approx(3.0));
  CHECK(v.mean[3] < v.mean[1]);
}

TEST_CASE("suite registry") {
  CHECK(suite_ids().size() == 6);
  CHECK_THROWS_AS(run_suite("nope"), ConfigError);
}
