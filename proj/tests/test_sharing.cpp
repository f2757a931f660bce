#include <doctest.h>

#include <cmath>
#include <map>

#include "p2pbandit/errors.hpp"
#include "p2pbandit/sharing.hpp"
#include "p2pbandit/simulation.hpp"

using namespace p2pbandit;

namespace {

RunConfig small(Protocol p, int V, int T, std::uint64_t seed = 0) {
  RunConfig c;
  c.protocol = p;
  c.V = V;
  c.d = 3;
  c.m = 6;
  c.T = T;
  c.seed = seed;
  return c;
}

Observation obs_of(double x0, double x1, double r) {
  Vec x(2);
  x << x0, x1;
  return {x, r};
}

Mat total_mass(const Network& net) {
  Mat total = Mat::Zero(net.d, net.d);
  for (const auto& a : net.agents) {
    total += a.active.A.matrix() - Mat::Identity(net.d, net.d);
    for (const auto& e : a.buffer) total += e.M;
  }
  return total;
}

}  // namespace

TEST_CASE("delay budget") {
  CHECK(delay_budget(16, 4) == 28);
  CHECK(DelaySchedule(4).tau(16) == 0);
  CHECK(delay_budget(2048, 4) == 56);
  CHECK(DelaySchedule(4).tau(2048) == 1992);
  CHECK(delay_budget(1, 1) == 0);
  CHECK(DelaySchedule(1).tau(1) == 1);
  // Independent evaluation of ceil(4·log₂(V^{3/2}t)) away from exact powers.
  for (int V : {2, 3, 16})
    for (int t : {3, 10, 77, 1999}) {
      const double direct = std::ceil(4.0 * std::log2(std::pow(V, 1.5) * t));
      CHECK(delay_budget(t, V) == static_cast<int>(direct));
    }
  CHECK(DelaySchedule(4, 0.0).budget(100) == 0);
  CHECK(DelaySchedule(4, 2.0, 4.0).budget(16) == static_cast<int>(std::ceil(2.0 * std::log(128.0) / std::log(4.0))));
}

TEST_CASE("permutations respect the groups") {
  Rng rng = make_stream(1, 0, 0, StreamTag::kTest);
  CHECK(draw_permutation(rng, {{0}}, 1) == Permutation{0});
  CHECK(draw_permutation(rng, {{0}, {1}}, 2) == Permutation{0, 1});

  int swaps = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) swaps += draw_permutation(rng, {{0, 1}}, 2) == Permutation{1, 0} ? 1 : 0;
  CHECK(std::abs(swaps - n / 2.0) < 3.0 * std::sqrt(n * 0.25));

  for (int k = 0; k < 100; ++k) {
    const auto sigma = draw_permutation(rng, {{0, 3, 4}, {1, 2}}, 5);
    for (int i : {0, 3, 4}) CHECK((sigma[i] == 0 || sigma[i] == 3 || sigma[i] == 4));
    for (int i : {1, 2}) CHECK((sigma[i] == 1 || sigma[i] == 2));
  }
  CHECK_THROWS_AS(draw_permutation(rng, {{0, 1}}, 3), InputError);
  CHECK_THROWS_AS(draw_permutation(rng, {{0, 1}, {1, 2}}, 3), InputError);
}

TEST_CASE("buffer averaging uses round-start snapshots") {
  Network net(Protocol::kDcb, 2, 1, DelaySchedule(2));
  net.agents[0].buffer.push_back({Mat::Constant(1, 1, 5.0), Vec::Constant(1, 5.0), 1});
  net.agents[1].buffer.push_back({Mat::Constant(1, 1, 3.0), Vec::Constant(1, 3.0), 1});
  average_buffers(net, {1, 0});
  CHECK(net.agents[0].buffer[0].M(0, 0) == 4.0);
  CHECK(net.agents[1].buffer[0].M(0, 0) == 4.0);
  CHECK(net.agents[1].buffer[0].v[0] == 4.0);

  average_buffers(net, {0, 1});
  CHECK(net.agents[0].buffer[0].M(0, 0) == 4.0);

  net.agents[1].buffer.pop_back();
  CHECK_THROWS_AS(average_buffers(net, {1, 0}), ProtocolError);
}

TEST_CASE("gossip conserves matrix mass up to the appended data") {
  Network net(Protocol::kDcb, 4, 2, DelaySchedule(4, 1.0));
  Rng rng = make_stream(2, 0, 0, StreamTag::kTest);
  std::normal_distribution<double> n01;
  for (int t = 1; t <= 40; ++t) {
    std::vector<Observation> obs;
    Mat added = Mat::Zero(2, 2);
    for (int i = 0; i < 4; ++i) {
      obs.push_back(obs_of(n01(rng), n01(rng), n01(rng)));
      obs.back().x.normalize();
      added += 4.0 * obs.back().x * obs.back().x.transpose();
    }
    const Mat before = total_mass(net);
    const auto sigma = draw_permutation(rng, {{0, 1, 2, 3}}, 4);
    gossip_round(net, sigma, obs, t);
    CHECK((total_mass(net) - before - added).cwiseAbs().maxCoeff() < 1e-9);
    for (const auto& a : net.agents) CHECK(a.buffer.size() <= static_cast<std::size_t>(net.schedule.budget(t)));
  }
}

TEST_CASE("weight trace: creation, swap and conservation") {
  WeightTrace w(2, 10);
  w.append(0, 0, 1, 2.0);
  w.append(1, 1, 1, 2.0);
  CHECK(w.weight(0, 0, 1) == 2.0);
  CHECK(w.weight(1, 0, 1) == 0.0);
  CHECK(w.datum_total(0, 1) == 2.0);
  w.average({1, 0});
  CHECK(w.weight(0, 0, 1) == 1.0);
  CHECK(w.weight(1, 0, 1) == 1.0);
  w.average({1, 0});
  CHECK(w.weight(0, 0, 1) == 1.0);
  CHECK(w.weight(1, 0, 1) == 1.0);
  w.flush_front(0);
  CHECK(w.active_weight(0, 1, 1) == 1.0);
  CHECK(w.buffer_length(0) == 0);
  CHECK(w.datum_total(1, 1) == 2.0);
  CHECK_THROWS_AS(WeightTrace(200, 100), ConfigError);
}

TEST_CASE("instant sharing equals the pooled single-agent design, bitwise") {
  Simulation sim(small(Protocol::kInstSharing, 4, 60, 5));
  PolicyState pooled(3);
  sim.on_decisions([&](const Simulation& s, int, std::span<const Observation> obs) {
    for (const auto& a : s.network().agents) {
      CHECK(a.active.A.matrix() == pooled.A.matrix());
      CHECK(a.active.b == pooled.b);
    }
    for (const auto& o : obs) pooled.observe(o.x, o.r);
  });
  sim.run();
}

TEST_CASE("gossip with one agent is no sharing") {
  Simulation dcb(small(Protocol::kDcb, 1, 200, 3));
  Simulation solo(small(Protocol::kNoSharing, 1, 200, 3));
  dcb.run();
  solo.run();
  CHECK(dcb.network().agents[0].active.A.matrix() == solo.network().agents[0].active.A.matrix());
  for (std::size_t k = 0; k < 200; ++k) CHECK(dcb.trace().rounds[k].cum_regret == solo.trace().rounds[k].cum_regret);
}

TEST_CASE("delayed sharing without delay is instant sharing") {
  RunConfig delayed = small(Protocol::kDelayed, 4, 100, 9);
  delayed.delay_mult = 0.0;
  Simulation a(delayed);
  Simulation b(small(Protocol::kInstSharing, 4, 100, 9));
  a.run();
  b.run();
  for (int i = 0; i < 4; ++i) CHECK(a.network().agents[i].active.A.matrix() == b.network().agents[i].active.A.matrix());
  for (std::size_t k = 0; k < 100; ++k) CHECK(a.trace().rounds[k].cum_regret == b.trace().rounds[k].cum_regret);
}

TEST_CASE("delayed sharing uses exactly the rounds up to tau") {
  Simulation sim(small(Protocol::kDelayed, 3, 80, 4));
  std::vector<Mat> prefix{Mat::Identity(3, 3)};
  sim.on_decisions([&](const Simulation& s, int t, std::span<const Observation> obs) {
    const int tau = t == 1 ? 0 : s.network().schedule.tau(t - 1);
    for (const auto& a : s.network().agents) {
      CHECK(a.active_through == tau);
      CHECK((a.active.A.matrix() - prefix[tau]).cwiseAbs().maxCoeff() < 1e-12);
    }
    Mat next = prefix.back();
    for (const auto& o : obs) next += o.x * o.x.transpose();
    prefix.push_back(next);
  });
  sim.run();
}

TEST_CASE("round robin forwards one hop per round") {
  Network net(Protocol::kRoundRobin, 3, 2, DelaySchedule(3));
  // Agent 0's round-1 datum is the only non-zero observation.
  const Observation marked = obs_of(1.0, 0.0, 1.0);
  const Observation blank = obs_of(0.0, 0.0, 0.0);
  const Permutation id{0, 1, 2};
  std::vector<Observation> round1{marked, blank, blank};
  std::vector<Observation> later{blank, blank, blank};
  step(net, 1, round1, id);
  CHECK(net.agents[0].active.A.matrix()(0, 0) == 2.0);
  CHECK(net.agents[1].active.A.matrix()(0, 0) == 1.0);
  step(net, 2, later, id);
  CHECK(net.agents[1].active.A.matrix()(0, 0) == 2.0);
  CHECK(net.agents[2].active.A.matrix()(0, 0) == 1.0);
  step(net, 3, later, id);
  CHECK(net.agents[2].active.A.matrix()(0, 0) == 2.0);
  step(net, 4, later, id);
  for (const auto& a : net.agents) CHECK(a.active.A.matrix()(0, 0) == 2.0);
}

TEST_CASE("round robin eventually holds everyone's data once") {
  Simulation sim(small(Protocol::kRoundRobin, 4, 30, 8));
  std::vector<std::vector<Observation>> history;
  sim.on_decisions([&](const Simulation&, int, std::span<const Observation> obs) {
    history.emplace_back(obs.begin(), obs.end());
  });
  sim.run();
  // After T rounds agent i has every datum of rounds ≤ T − 3, plus the ring's
  // partial deliveries of the last three rounds.
  for (int i = 0; i < 4; ++i) {
    Mat expected = Mat::Identity(3, 3);
    for (int t = 1; t <= 30; ++t)
      for (int src = 0; src < 4; ++src) {
        const int hops = ((i - src) % 4 + 4) % 4;
        if (t + hops <= 30) expected += history[t - 1][src].x * history[t - 1][src].x.transpose();
      }
    CHECK((sim.network().agents[i].active.A.matrix() - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("step rejects dccb and wrong sizes") {
  Network net(Protocol::kDccb, 2, 2, DelaySchedule(2));
  std::vector<Observation> obs{obs_of(1, 0, 0), obs_of(0, 1, 0)};
  CHECK_THROWS_AS(step(net, 1, obs, {0, 1}), ConfigError);
  Network dcb(Protocol::kDcb, 2, 2, DelaySchedule(2));
  CHECK_THROWS_AS(step(dcb, 1, std::span<const Observation>(obs).first(1), {0, 1}), ProtocolError);
  CHECK_THROWS_AS(parse_protocol("gossip"), ConfigError);
  CHECK(parse_protocol("roundrobin") == Protocol::kRoundRobin);
}
