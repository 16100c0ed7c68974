#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/interference.h"

using namespace vidmesh;
using vidmesh::testing::MakeScenario;
using vidmesh::testing::SinrOracle;

namespace {

// I_e straight from the definition: any x outside the endpoints whose lone
// transmission breaks either orientation of e at the margin.
std::vector<LinkId> ConflictOracle(const Network& net, const Link& l) {
  const RadioConfig& cfg = net.radio();
  const std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  const double fwd = cfg.mu * net.mcs().at(l.mcs).beta;
  const double rev = cfg.mu * net.mcs().beta0();
  std::set<NodeId> victims;
  for (NodeId x = 0; x < net.num_nodes(); ++x) {
    if (x == l.u || x == l.v) continue;
    const double uv = SinrOracle(cfg, nodes, l.u, l.v, {x});
    const double vu = SinrOracle(cfg, nodes, l.v, l.u, {x});
    if (uv < fwd || vu < rev || vu < fwd || uv < rev) victims.insert(x);
  }
  std::vector<LinkId> out;
  for (const Link& o : net.links()) {
    if (o.id == l.id) continue;
    if (victims.count(o.u) || victims.count(o.v)) out.push_back(o.id);
  }
  return out;
}

}  // namespace

TEST_CASE("square of side 142 m: I_e equals the exhaustive oracle") {
  const Network net(MakeScenario({{0, 0}, {142, 0}, {142, 142}, {0, 142}}, {{0, 2}}));
  REQUIRE(net.num_links() > 0);
  const InterferenceIndex index = BuildInterferenceIndex(net);
  for (const Link& l : net.links()) CHECK(index.conflicts[l.id] == ConflictOracle(net, l));
}

TEST_CASE("mixed geometry: I_e equals the exhaustive oracle") {
  const Network net(MakeScenario({{0, 0}, {60, 10}, {130, 0}, {200, 40}, {420, 0}, {480, 60}},
                                 {{0, 3}}));
  const InterferenceIndex index = BuildInterferenceIndex(net);
  for (const Link& l : net.links()) {
    CHECK(index.conflicts[l.id] == ConflictOracle(net, l));
    CHECK(std::is_sorted(index.victims[l.id].begin(), index.victims[l.id].end()));
  }
}

TEST_CASE("far-apart pairs do not conflict") {
  const Network net(MakeScenario({{0, 0}, {50, 0}, {3000, 0}, {3050, 0}}, {{0, 1}}));
  const InterferenceIndex index = BuildInterferenceIndex(net);
  for (const Link& l : net.links()) {
    for (LinkId o : index.conflicts[l.id]) {
      const Link& other = net.link(o);
      // Only links of the same pair may appear.
      CHECK(std::min(other.u, other.v) == std::min(l.u, l.v));
    }
  }
}

TEST_CASE("conflict graph is symmetric and includes node sharing") {
  const Network net(MakeScenario({{0, 0}, {100, 0}, {200, 0}, {300, 0}, {700, 0}, {800, 0}},
                                 {{0, 3}}));
  const InterferenceIndex index = BuildInterferenceIndex(net);
  const ConflictGraph graph(net, index);
  for (const Link& a : net.links()) {
    CHECK_FALSE(graph.Conflicts(a.id, a.id));
    std::set<LinkId> listed(graph.same_channel(a.id).begin(), graph.same_channel(a.id).end());
    for (const Link& b : net.links()) {
      if (a.id == b.id) continue;
      CHECK(graph.Conflicts(a.id, b.id) == graph.Conflicts(b.id, a.id));
      const bool share = a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
      const auto& ia = index.conflicts[a.id];
      const auto& ib = index.conflicts[b.id];
      const bool in_i = std::binary_search(ia.begin(), ia.end(), b.id) ||
                        std::binary_search(ib.begin(), ib.end(), a.id);
      CHECK(graph.Conflicts(a.id, b.id) == (share || in_i));
      CHECK(listed.count(b.id) == (share || in_i ? 1u : 0u));
      const auto& sn = graph.shares_node(a.id);
      CHECK(std::binary_search(sn.begin(), sn.end(), b.id) == share);
    }
  }
  CHECK(CountAsymmetricConflicts(index) >= 0);
}

TEST_CASE("degenerate links conflict with everything") {
  // 142.857 m has less than 2 dB of margin over the MCS-0 threshold.
  const double s = 1000.0 / 7.0;
  const Network net(MakeScenario({{0, 0}, {s, 0}, {2 * s, 0}, {5 * s, 0}, {6 * s, 0}}, {{0, 2}}));
  const InterferenceIndex index = BuildInterferenceIndex(net);
  for (const Link& l : net.links()) {
    CHECK(l.snr0 < net.radio().mu * net.mcs().at(l.mcs).beta);
    CHECK(index.victims[l.id].size() == 3);
    // Everything except e and its reverse, which shares both endpoints and
    // is handled as node sharing.
    CHECK(index.conflicts[l.id].size() == static_cast<size_t>(net.num_links() - 2));
  }
}

TEST_CASE("graph model on the 7x7 grid matches a pairwise check") {
  const double s = 1000.0 / 7.0;
  std::vector<Node> nodes;
  for (int i = 0; i < 49; ++i) nodes.push_back({i, (i % 7) * s, (i / 7) * s});
  const std::vector<Link> links = ProtocolLinks(nodes, 150.0);
  CHECK(links.size() == 2 * 2 * 7 * 6);  // 84 undirected lattice edges
  const auto pairs = ProtocolConflicts(nodes, links, 150.0, 250.0);
  std::set<std::pair<LinkId, LinkId>> got(pairs.begin(), pairs.end());
  CHECK(got.size() == pairs.size());
  size_t expected = 0;
  for (size_t a = 0; a < links.size(); ++a) {
    for (size_t b = a + 1; b < links.size(); ++b) {
      const NodeId ea[] = {links[a].u, links[a].v};
      const NodeId eb[] = {links[b].u, links[b].v};
      double dmin = 1e300;
      for (NodeId x : ea) {
        for (NodeId y : eb) {
          dmin = std::min(dmin, std::hypot(nodes[x].x - nodes[y].x, nodes[x].y - nodes[y].y));
        }
      }
      if (dmin < 250.0) {
        ++expected;
        CHECK(got.count({static_cast<LinkId>(a), static_cast<LinkId>(b)}) == 1);
      }
    }
  }
  CHECK(got.size() == expected);
}
