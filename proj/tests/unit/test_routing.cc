#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/routing.h"

using namespace vidmesh;
using vidmesh::testing::LineXY;
using vidmesh::testing::MakeScenario;

namespace {

LinkId Best(const Network& net, NodeId u, NodeId v) {
  LinkId best = -1;
  for (LinkId e : net.out_links(u)) {
    if (net.link(e).v == v && (best < 0 || net.link(e).pps > net.link(best).pps)) best = e;
  }
  return best;
}

}  // namespace

TEST_CASE("a relay with a wider bottleneck beats the direct weak link") {
  // 0 -> 2 directly at 140 m is MCS 0 only; the 70 m hops carry far more.
  const Network net(MakeScenario(LineXY(3, 70.0), {{0, 2}}, 100.0));
  REQUIRE(Best(net, 0, 2) >= 0);
  REQUIRE(net.link(Best(net, 0, 2)).pps < net.link(Best(net, 0, 1)).pps);
  const std::vector<Route> routes = ShortpRoute(net, ChannelPolicy::kRoundRobin, 1);
  REQUIRE(routes.size() == 1);
  CHECK(routes[0].links == std::vector<LinkId>{Best(net, 0, 1), Best(net, 1, 2)});
  CHECK(PathNodes(net, routes[0].links) == std::vector<NodeId>{0, 1, 2});
  const int cap = std::min(net.link(Best(net, 0, 1)).cap, net.link(Best(net, 1, 2)).cap);
  CHECK(routes[0].weight == std::min<double>(net.DemandPackets(0), cap));
}

TEST_CASE("at equal bottleneck the fewest hops win") {
  // A 100 m line: 0 -> 1 direct beats any detour, and 0 -> 3 uses the
  // three lattice hops since nothing skips ahead at the same rate.
  const Network net(MakeScenario(LineXY(4, 100.0), {{0, 1}, {0, 3}}, 1.0));
  const std::vector<Route> routes = ShortpRoute(net, ChannelPolicy::kRoundRobin, 1);
  REQUIRE(routes.size() == 2);
  CHECK(routes[0].links.size() == 1);
  CHECK(PathNodes(net, routes[1].links).front() == 0);
  CHECK(PathNodes(net, routes[1].links).back() == 3);
  // Demand caps the weight: 1 Mbps is 64 packets per period.
  CHECK(routes[0].weight == 64.0);
}

TEST_CASE("channel policies") {
  const Network net(MakeScenario(LineXY(6, 100.0), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}));
  const int F = net.radio().num_freq;
  const std::vector<Route> rr = ShortpRoute(net, ChannelPolicy::kRoundRobin, 5);
  REQUIRE(rr.size() == 5);
  for (size_t i = 0; i < rr.size(); ++i) CHECK(rr[i].freq == static_cast<int>(i) % F);

  const std::vector<Route> a = ShortpRoute(net, ChannelPolicy::kRandom, 5);
  const std::vector<Route> b = ShortpRoute(net, ChannelPolicy::kRandom, 5);
  std::set<int> seen;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].freq == b[i].freq);
    CHECK(a[i].freq >= 0);
    CHECK(a[i].freq < F);
    seen.insert(a[i].freq);
  }
  bool differs = false;
  for (uint64_t s = 6; s < 20 && !differs; ++s) {
    const std::vector<Route> c = ShortpRoute(net, ChannelPolicy::kRandom, s);
    for (size_t i = 0; i < a.size(); ++i) differs = differs || c[i].freq != a[i].freq;
  }
  CHECK(differs);
}

TEST_CASE("unreachable streams get no route") {
  const Network net(MakeScenario({{0, 0}, {100, 0}, {5000, 0}}, {{0, 2}, {0, 1}}));
  const std::vector<Route> routes = ShortpRoute(net, ChannelPolicy::kRoundRobin, 1);
  REQUIRE(routes.size() == 1);
  CHECK(routes[0].stream == 1);
  CHECK(routes[0].freq == 0);
}

TEST_CASE("routes to mf and back") {
  const Network net(MakeScenario(LineXY(3, 100.0), {{0, 2}, {2, 0}}, 1.0));
  const std::vector<Route> routes = ShortpRoute(net, ChannelPolicy::kRoundRobin, 1);
  const MfTable mf = RoutesToMf(net, routes);
  for (const Route& r : routes) {
    for (LinkId e : r.links) CHECK(mf.at(e, r.stream) == static_cast<int>(r.weight));
  }
  CHECK(mf.total() == 2 * 2 * 64);
}

TEST_CASE("peeled paths merge into weighted routes on the dominant channel") {
  const Network net(MakeScenario(LineXY(3, 100.0), {{0, 2}}));
  const std::vector<LinkId> path = {Best(net, 0, 1), Best(net, 1, 2)};
  FlowPathSet ps;
  ps.paths.resize(1);
  ps.paths[0].push_back({0, path, 5});
  ps.paths[0].push_back({0, path, 5});
  ps.paths[0].push_back({0, path, 2});

  const std::vector<Route> plain = PathsToRoutes(net, ps, nullptr);
  REQUIRE(plain.size() == 1);
  CHECK(plain[0].weight == 12.0);
  CHECK(plain[0].freq == 0);

  MultiFlow f(1, net.radio().num_freq, net.num_links());
  for (LinkId e : path) {
    f.at(0, 0, e) = 2.0;
    f.at(0, 2, e) = 10.0;
  }
  const std::vector<Route> split = PathsToRoutes(net, ps, &f);
  REQUIRE(split.size() == 1);
  CHECK(split[0].freq == 2);
}
