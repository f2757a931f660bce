#include <doctest.h>

#include <sstream>

#include "p2pbandit/simulation.hpp"

using namespace p2pbandit;

namespace {

std::string csv_of(const RunConfig& c) {
  Simulation sim(c);
  sim.run();
  std::ostringstream out;
  write_runs_csv(out, c, sim.problem(), sim.trace());
  write_prunes_csv(out, sim.trace());
  return out.str();
}

RunConfig base(Protocol p) {
  RunConfig c;
  c.protocol = p;
  c.V = 6;
  c.d = 3;
  c.T = 120;
  c.seed = 4;
  c.emit_bounds = true;
  return c;
}

}  // namespace

TEST_CASE("runs are deterministic per config and seed") {
  for (Protocol p : {Protocol::kNoSharing, Protocol::kInstSharing, Protocol::kDelayed, Protocol::kRoundRobin,
                     Protocol::kDcb, Protocol::kDccb}) {
    RunConfig c = base(p);
    if (p == Protocol::kDccb) {
      c.clusters = {3, 3};
      c.thresh_coef = 1.0;
    }
    CHECK(csv_of(c) == csv_of(c));
  }
  RunConfig other = base(Protocol::kDcb);
  other.seed = 5;
  CHECK(csv_of(other) != csv_of(base(Protocol::kDcb)));
}

TEST_CASE("csv layout") {
  const RunConfig c = base(Protocol::kDcb);
  std::istringstream in(csv_of(c));
  std::string line;
  int header = 0, rows = 0;
  bool saw_columns = false;
  double prev_regret = -1.0;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      ++header;
    } else if (line.rfind("run_id", 0) == 0) {
      CHECK(line == "run_id,protocol,seed,round,network_cum_regret,comm_bits_round,comm_bits_cum,"
                    "clusters_discovered_frac,bound_value");
      saw_columns = true;
    } else if (line.rfind("dcb-s4", 0) == 0) {
      ++rows;
      std::stringstream fields(line);
      std::string f;
      for (int k = 0; k < 5; ++k) std::getline(fields, f, ',');
      const double regret = std::stod(f);
      CHECK(regret >= prev_regret);
      prev_regret = regret;
    } else if (line.rfind("round,agent_a", 0) == 0) {
      break;
    }
  }
  CHECK(saw_columns);
  CHECK(header >= 2);
  CHECK(rows == c.T);
}

TEST_CASE("protocols see the same environment under one seed") {
  Simulation a(base(Protocol::kNoSharing));
  Simulation b(base(Protocol::kInstSharing));
  a.step();
  b.step();
  for (int i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < a.last_contexts()[i].size(); ++k)
      CHECK(a.last_contexts()[i][k] == b.last_contexts()[i][k]);
}

TEST_CASE("lone agent: gossip and no sharing give identical regret columns") {
  RunConfig g = base(Protocol::kDcb);
  g.V = 1;
  RunConfig n = base(Protocol::kNoSharing);
  n.V = 1;
  Simulation a(g), b(n);
  a.run();
  b.run();
  for (std::size_t k = 0; k < a.trace().rounds.size(); ++k)
    CHECK(a.trace().rounds[k].cum_regret == b.trace().rounds[k].cum_regret);
}

TEST_CASE("trace invariants") {
  Simulation sim(base(Protocol::kDcb));
  sim.run();
  const auto& rounds = sim.trace().rounds;
  REQUIRE(rounds.size() == 120);
  for (std::size_t k = 1; k < rounds.size(); ++k) {
    CHECK(rounds[k].regret_round >= 0.0);
    CHECK(rounds[k].cum_regret >= rounds[k - 1].cum_regret);
    CHECK(rounds[k].comm_bits_cum >= rounds[k - 1].comm_bits_cum);
  }
  CHECK(sim.trace().recovery_round == 1);
  CHECK(sim.trace().cluster_cum_regret.back()[0] == doctest::Approx(rounds.back().cum_regret));
  CHECK_THROWS(sim.step());

  const auto bounds = bound_series(sim.config(), sim.problem(), sim.trace());
  for (std::size_t k = 0; k < rounds.size(); ++k) CHECK(rounds[k].cum_regret < bounds[k]);
}
