#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "doctest.h"
#include "vidmesh/error.h"
#include "vidmesh/network.h"
#include "vidmesh/scenario.h"

using namespace vidmesh;

TEST_CASE("grid lattice") {
  const Scenario sc = GenGrid(12, 10.0, 7);
  REQUIRE(sc.nodes.size() == 49);
  CHECK(sc.nodes[1].x - sc.nodes[0].x == doctest::Approx(1000.0 / 7.0));
  CHECK(sc.nodes[7].y - sc.nodes[0].y == doctest::Approx(1000.0 / 7.0));
  CHECK(sc.nodes[48].x == doctest::Approx(6000.0 / 7.0));

  REQUIRE(sc.streams.size() == 12);
  std::set<std::pair<int, int>> pairs;
  for (const StreamRequest& r : sc.streams) {
    CHECK(r.source != r.dest);
    CHECK(r.demand_mbps == 10.0);
    pairs.insert({r.source, r.dest});
  }
  CHECK(pairs.size() == 12);

  const Scenario again = GenGrid(12, 10.0, 7);
  const Scenario other = GenGrid(12, 10.0, 8);
  bool same = true, differs = false;
  for (size_t i = 0; i < 12; ++i) {
    same = same && again.streams[i].source == sc.streams[i].source &&
           again.streams[i].dest == sc.streams[i].dest;
    differs = differs || other.streams[i].source != sc.streams[i].source ||
              other.streams[i].dest != sc.streams[i].dest;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("circle requests follow the chained formula") {
  const Scenario sc = GenCircle(12, 10.0);
  REQUIRE(sc.nodes.size() == 24);
  REQUIRE(sc.streams.size() == 12);
  int a = 2;  // ceil(24/12)
  for (const StreamRequest& r : sc.streams) {
    CHECK(r.source == a % 24);
    CHECK(r.dest == (a + 2) % 24);
    a = r.dest;
  }
  const double chord = std::hypot(sc.nodes[2].x - sc.nodes[0].x, sc.nodes[2].y - sc.nodes[0].y);
  CHECK(chord == doctest::Approx(2 * 500 * std::sin(std::numbers::pi / 12)));
  const double step = std::hypot(sc.nodes[1].x - sc.nodes[0].x, sc.nodes[1].y - sc.nodes[0].y);
  CHECK(step == doctest::Approx(130.5).epsilon(1e-3));

  const Scenario k24 = GenCircle(24, 1.0);
  for (const StreamRequest& r : k24.streams) CHECK((r.dest - r.source + 24) % 24 == 1);
}

TEST_CASE("scenario JSON round trip") {
  Scenario sc = GenGrid(4, 2.5, 3);
  sc.radio.mu = DbToLinear(3.0);
  sc.radio.num_freq = 2;
  const Scenario back = ParseScenario(SerializeScenario(sc));
  CHECK(back.name == sc.name);
  REQUIRE(back.nodes.size() == sc.nodes.size());
  for (size_t i = 0; i < sc.nodes.size(); ++i) {
    CHECK(back.nodes[i].x == doctest::Approx(sc.nodes[i].x));
    CHECK(back.nodes[i].y == doctest::Approx(sc.nodes[i].y));
  }
  CHECK(back.radio.mu == doctest::Approx(sc.radio.mu));
  CHECK(back.radio.num_freq == 2);
  CHECK(back.radio.ref_gain == doctest::Approx(sc.radio.ref_gain));
  REQUIRE(back.streams.size() == 4);
  CHECK(back.streams[3].source == sc.streams[3].source);
  CHECK(back.streams[3].demand_mbps == 2.5);
  CHECK(back.mcs.size() == 8);
}

TEST_CASE("minimal scenario file falls back to defaults") {
  const Scenario sc = ParseScenario(R"({
    "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}],
    "streams": [{"source": 0, "dest": 1, "demand_mbps": 1}]
  })");
  const RadioConfig d = RadioConfig::Defaults();
  CHECK(sc.radio.ref_gain == doctest::Approx(d.ref_gain));
  CHECK(sc.radio.num_slots == 200);
  CHECK(Network(sc).num_links() > 0);
}

TEST_CASE("malformed scenarios are rejected") {
  CHECK_THROWS_AS(ParseScenario("{"), InputError);
  CHECK_THROWS_AS(ParseScenario(R"({"nodes": [{"id": 1, "x": 0, "y": 0}]})"), InputError);
  CHECK_THROWS_AS(ParseScenario(R"({"nodes": [{"id": 0, "x": 0, "y": 0},
                                               {"id": 1, "x": 0, "y": 0}]})"),
                  InputError);
  CHECK_THROWS_AS(ParseScenario(R"({"nodes": [{"id": 0, "x": 0, "y": 0},
                                               {"id": 1, "x": 50, "y": 0}],
                                    "streams": [{"source": 0, "dest": 0, "demand_mbps": 1}]})"),
                  InputError);
  CHECK_THROWS_AS(ParseScenario(R"({"nodes": [{"id": 0, "x": 0, "y": 0},
                                               {"id": 1, "x": 50, "y": 0}],
                                    "streams": [{"source": 0, "dest": 1, "demand_mbps": -1}]})"),
                  InputError);
  CHECK_THROWS_AS(LoadScenario("/nonexistent/scenario.json"), InputError);
  CHECK_THROWS_AS(GenCircle(30, 1.0), InputError);
}
