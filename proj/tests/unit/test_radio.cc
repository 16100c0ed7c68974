#include <cmath>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/error.h"
#include "vidmesh/radio.h"

using namespace vidmesh;
using vidmesh::testing::PowerOracle;
using vidmesh::testing::SinrOracle;

TEST_CASE("dB conversions round trip") {
  CHECK(DbToLinear(10.0) == doctest::Approx(10.0));
  CHECK(DbToLinear(3.0) == doctest::Approx(1.99526).epsilon(1e-5));
  CHECK(LinearToDb(DbToLinear(-7.25)) == doctest::Approx(-7.25));
  CHECK(DbmToMw(-100.0) == doctest::Approx(1e-10));
}

TEST_CASE("received power is P*g/d^alpha") {
  RadioConfig cfg;  // ref_gain = 1
  const Node a{0, 0.0, 0.0}, b{1, 100.0, 0.0}, c{2, 200.0, 0.0};
  CHECK(ReceivedPower(a, b, cfg) == doctest::Approx(100.0 / std::pow(100.0, 4.1)));
  CHECK(ReceivedPower(a, c, cfg) / ReceivedPower(a, b, cfg) ==
        doctest::Approx(std::pow(2.0, -4.1)));
  CHECK_THROWS_AS(ReceivedPower(a, Node{3, 0.0, 0.0}, cfg), InputError);
}

TEST_CASE("calibrated MCS-0 range") {
  const RadioConfig cfg = RadioConfig::Defaults();
  const McsTable mcs = McsTable::Default();
  // Solve P*g/d^alpha = beta0*N for d directly.
  const double noise = std::pow(10.0, cfg.noise_dbm / 10.0);
  const double d = std::pow(cfg.tx_power_mw * cfg.ref_gain / (mcs.beta0() * noise),
                            1.0 / cfg.alpha);
  CHECK(d == doctest::Approx(150.0).epsilon(1e-9));
  CHECK(RangeForThreshold(cfg, mcs.beta0()) == doctest::Approx(d));
  CHECK(d >= 140.0);
  CHECK(d <= 160.0);

  const std::vector<Node> inside = {{0, 0, 0}, {1, 149.0, 0}};
  const std::vector<Node> outside = {{0, 0, 0}, {1, 151.0, 0}};
  CHECK_FALSE(BuildLinks(inside, mcs, cfg).empty());
  CHECK(BuildLinks(outside, mcs, cfg).empty());
}

TEST_CASE("sinr with no interferers equals snr0") {
  const RadioConfig cfg = RadioConfig::Defaults();
  const std::vector<Node> nodes = {{0, 0, 0}, {1, 120, 0}, {2, 400, 30}};
  const std::vector<NodeId> none, self = {0};
  const double snr0 = Sinr(nodes, 0, 1, none, cfg);
  CHECK(snr0 == doctest::Approx(SinrOracle(cfg, nodes, 0, 1, {})));
  CHECK(Sinr(nodes, 0, 1, self, cfg) == doctest::Approx(snr0));
  const std::vector<NodeId> other = {2};
  CHECK(Sinr(nodes, 0, 1, other, cfg) ==
        doctest::Approx(SinrOracle(cfg, nodes, 0, 1, {2})));
}

TEST_CASE("one interferer at 250 m costs about 1 dB on a max-range link") {
  const RadioConfig cfg = RadioConfig::Defaults();
  const std::vector<Node> nodes = {{0, 0, 0}, {1, 150, 0}, {2, 400, 0}};
  const std::vector<NodeId> none, one = {2};
  const double drop =
      LinearToDb(Sinr(nodes, 0, 1, none, cfg)) - LinearToDb(Sinr(nodes, 0, 1, one, cfg));
  const double oracle = LinearToDb(SinrOracle(cfg, nodes, 0, 1, {})) -
                        LinearToDb(SinrOracle(cfg, nodes, 0, 1, {2}));
  CHECK(drop == doctest::Approx(oracle));
  CHECK(drop >= 0.5);
  CHECK(drop <= 1.5);
}

TEST_CASE("packets per slot") {
  const RadioConfig cfg = RadioConfig::Defaults();
  const int expect[] = {1, 2, 3, 5, 7, 10, 14, 16};
  const McsTable mcs = McsTable::Default();
  for (const McsEntry& e : mcs.entries()) {
    const int oracle =
        static_cast<int>(std::floor(e.rate_mbps * 1e6 * 0.005 / 16384.0));
    CHECK(PacketsPerSlot(e.rate_mbps, cfg) == oracle);
    CHECK(PacketsPerSlot(e.rate_mbps, cfg) == expect[e.index]);
  }
  bool clamped = false;
  CHECK(PacketsPerSlot(1.0, cfg, &clamped) == 1);
  CHECK(clamped);
}

TEST_CASE("link set matches a brute-force threshold check") {
  const RadioConfig cfg = RadioConfig::Defaults();
  const McsTable mcs = McsTable::Default();
  const std::vector<Node> nodes = {{0, 0, 0}, {1, 40, 0}, {2, 100, 20}, {3, 130, 90},
                                   {4, 300, 0}};
  const std::vector<Link> links = BuildLinks(nodes, mcs, cfg);
  size_t expected = 0;
  for (const Node& u : nodes) {
    for (const Node& v : nodes) {
      if (u.id == v.id) continue;
      const double snr0 =
          PowerOracle(cfg, std::hypot(u.x - v.x, u.y - v.y)) / DbmToMw(cfg.noise_dbm);
      for (const McsEntry& e : mcs.entries()) {
        if (snr0 >= e.beta) ++expected;
      }
    }
  }
  CHECK(links.size() == expected);
  for (size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    CHECK(l.id == static_cast<LinkId>(i));
    CHECK(l.u != l.v);
    CHECK(l.snr0 >= mcs.at(l.mcs).beta);
    CHECK(l.cap == cfg.num_slots * l.pps);
    if (i > 0) {
      const Link& p = links[i - 1];
      CHECK(std::tie(p.u, p.v, p.mcs) < std::tie(l.u, l.v, l.mcs));
    }
  }
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(McsTable({{0, 6, 2.0}, {1, 6, 3.0}}), InputError);
  CHECK_THROWS_AS(McsTable({{0, 6, 3.0}, {1, 9, 2.0}}), InputError);
  CHECK_THROWS_AS(McsTable({{1, 6, 3.0}}), InputError);
  RadioConfig cfg = RadioConfig::Defaults();
  cfg.mu = 0.5;
  CHECK_THROWS_AS(cfg.Validate(), InputError);
  cfg = RadioConfig::Defaults();
  cfg.mac_efficiency = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), InputError);
}
