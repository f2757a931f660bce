#include <doctest.h>

#include <cmath>

#include "p2pbandit/bandit_env.hpp"
#include "p2pbandit/errors.hpp"

using namespace p2pbandit;

TEST_CASE("contexts lie on the unit sphere") {
  Rng rng = make_stream(1, 0, 0, StreamTag::kTest);
  for (int d : {1, 2, 5, 9})
    for (const auto& x : sample_context_set(rng, 20, d)) CHECK(std::abs(x.norm() - 1.0) < 1e-12);
}

TEST_CASE("one-dimensional contexts are fair signs") {
  Rng rng = make_stream(2, 0, 0, StreamTag::kTest);
  int plus = 0;
  const int n = 10000;
  for (const auto& x : sample_context_set(rng, n, 1)) {
    CHECK(std::abs(x[0]) == 1.0);
    plus += x[0] > 0 ? 1 : 0;
  }
  CHECK(std::abs(plus - n / 2.0) < 3.0 * std::sqrt(n * 0.25));
}

TEST_CASE("context second moment is I/d") {
  Rng rng = make_stream(3, 0, 0, StreamTag::kTest);
  const int d = 3;
  Mat moment = Mat::Zero(d, d);
  const auto xs = sample_context_set(rng, 100000, d);
  for (const auto& x : xs) moment += x * x.transpose();
  moment /= static_cast<double>(xs.size());
  CHECK((moment - Mat::Identity(d, d) / d).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("rewards") {
  Rng rng = make_stream(4, 0, 0, StreamTag::kTest);
  Vec theta = Vec::Unit(2, 0);
  Vec x(2);
  x << 0.6, 0.8;
  CHECK(reward(x, theta, 0.0, rng) == 0.6);
  CHECK(reward(Vec::Zero(2), theta, 0.0, rng) == 0.0);
  double mean = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) mean += reward(x, theta, 1.0, rng);
  CHECK(std::abs(mean / n - 0.6) < 0.02);
  CHECK_THROWS_AS(reward(Vec::Ones(3), theta, 0.0, rng), InputError);
}

TEST_CASE("cluster problems") {
  ProblemSpec spec;
  spec.cluster_sizes = {4};
  spec.d = 3;
  const auto one = make_cluster_problem(spec);
  REQUIRE(one.clusters.size() == 1);
  CHECK(one.clusters[0].theta.norm() == doctest::Approx(spec.S));
  CHECK(one.V == 4);

  spec.cluster_sizes = {3, 5};
  spec.d = 2;
  spec.gamma = 1.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    const auto two = make_cluster_problem(spec);
    CHECK((two.clusters[0].theta - two.clusters[1].theta).norm() >= 1.0);
    CHECK(two.cluster_of == std::vector<int>{0, 0, 0, 1, 1, 1, 1, 1});
    const auto again = make_cluster_problem(spec);
    CHECK(again.clusters[1].theta == two.clusters[1].theta);
  }

  spec.gamma = 2.5;  // further apart than any two points of the unit sphere
  spec.max_attempts = 50;
  CHECK_THROWS_AS(make_cluster_problem(spec), ConfigError);
}
