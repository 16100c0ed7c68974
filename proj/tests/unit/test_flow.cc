#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/error.h"
#include "vidmesh/flow.h"
#include "vidmesh/interference.h"

using namespace vidmesh;
using vidmesh::testing::LineXY;
using vidmesh::testing::MakeScenario;

namespace {

struct Built {
  explicit Built(Scenario sc) : net(sc), index(BuildInterferenceIndex(net)), graph(net, index) {}
  Network net;
  InterferenceIndex index;
  ConflictGraph graph;
};

MultiFlow Solve(const Built& b, LpOptions o = {}) {
  return SolveLp(BuildLp(b.net, o.with_interference ? &b.graph : nullptr, o));
}

// Best capacity on u->v among links the LP keeps.
int BestCap(const Network& net, NodeId u, NodeId v) {
  int best = 0;
  for (LinkId e : net.out_links(u)) {
    const Link& l = net.link(e);
    if (l.v != v) continue;
    if (l.mcs == 0 || l.snr0 >= net.radio().mu * net.mcs().at(l.mcs).beta) {
      best = std::max(best, l.cap);
    }
  }
  return best;
}

// Net outflow per node of one stream's aggregate flow.
std::vector<double> NetOut(const Network& net, const MultiFlow& f, int i) {
  std::vector<double> out(net.num_nodes(), 0.0);
  for (const Link& l : net.links()) {
    const double v = f.stream_flow(i, l.id);
    out[l.u] += v;
    out[l.v] -= v;
  }
  return out;
}

}  // namespace

TEST_CASE("single link: rho = c/d, or 1 when capped") {
  const Built b(MakeScenario({{0, 0}, {100, 0}}, {{0, 1}}, 100.0));
  const int c = BestCap(b.net, 0, 1);
  const double d = b.net.DemandPackets(0);
  REQUIRE(d > c);
  const MultiFlow f = Solve(b);
  CHECK(f.rho == doctest::Approx(c / d).epsilon(1e-6));
  CHECK(f.rho_i[0] == doctest::Approx(c / d).epsilon(1e-6));

  const Built small(MakeScenario({{0, 0}, {100, 0}}, {{0, 1}}, 1.0));
  LpOptions capped;
  capped.cap_rho = true;
  CHECK(Solve(small, capped).rho == doctest::Approx(1.0));
}

TEST_CASE("three-node line: optimum is c/2, matching a grid search") {
  // a - m - b, 100 m apart; a and b are out of range of each other.
  const Built b(MakeScenario(LineXY(3, 100.0), {{0, 2}}, 100.0));
  const int c = BestCap(b.net, 0, 1);
  REQUIRE(c == BestCap(b.net, 1, 2));
  const double d = b.net.DemandPackets(0);

  // Hand rows: f_j on each hop per channel j, both hops share node m, so
  // every (hop, j) row sums all hop loads: sum_j 2 f_j / c <= 1.
  double best = 0.0;
  const int steps = 400;
  for (int s0 = 0; s0 <= steps; ++s0) {
    for (int s1 = 0; s0 + s1 <= steps; s1 += 4) {
      const double f0 = c * s0 / (2.0 * steps), f1 = c * s1 / (2.0 * steps);
      if (2 * (f0 + f1) / c <= 1.0 + 1e-12) best = std::max(best, f0 + f1);
    }
  }
  const MultiFlow f = Solve(b);
  CHECK(f.rho * d == doctest::Approx(c / 2.0).epsilon(1e-6));
  CHECK(std::abs(f.rho * d - best) <= 1e-4 * c);

  LpOptions full;
  full.form = LpForm::kFull;
  CHECK(Solve(b, full).rho == doctest::Approx(f.rho).epsilon(1e-7));

  LpOptions simplex_opts;
  lp::SolverOptions so;
  so.backend = lp::Backend::kSimplex;
  CHECK(SolveLp(BuildLp(b.net, &b.graph, simplex_opts), so).rho ==
        doctest::Approx(f.rho).epsilon(1e-7));
}

TEST_CASE("compact and full forms agree; the lower-index variant is a relaxation") {
  const Built b(MakeScenario({{0, 0}, {110, 20}, {200, -30}, {90, 130}, {230, 120}, {330, 40}},
                             {{0, 5}, {3, 2}, {4, 1}}, 30.0));
  const MultiFlow compact = Solve(b);
  LpOptions full;
  full.form = LpForm::kFull;
  CHECK(Solve(b, full).rho == doctest::Approx(compact.rho).epsilon(1e-7));
  LpOptions lower;
  lower.freq_sum = ConflictFreqSum::kLower;
  LpOptions pure;
  pure.lambda = 0.0;
  LpOptions pure_lower = lower;
  pure_lower.lambda = 0.0;
  CHECK(Solve(b, pure_lower).rho >= Solve(b, pure).rho - 1e-9);
  LpOptions plain;
  plain.with_interference = false;
  CHECK(Solve(b, plain).rho >= Solve(b, pure).rho - 1e-9);
}

TEST_CASE("LP solution properties") {
  const Built b(MakeScenario({{0, 0}, {120, 0}, {240, 0}, {120, 120}, {240, 120}, {0, 120}},
                             {{0, 4}, {5, 2}, {3, 1}}, 40.0));
  const MultiFlow f = Solve(b);
  // Capacity rows are implied by the conflict rows.
  for (const Link& l : b.net.links()) CHECK(f.link_flow(l.id) <= l.cap + 1e-6);
  // rho is the smallest ratio.
  const double mn = *std::min_element(f.rho_i.begin(), f.rho_i.end());
  CHECK(f.rho == doctest::Approx(mn).epsilon(1e-7));
  // Conservation with rho_i d_i leaving the source.
  for (int i = 0; i < b.net.num_streams(); ++i) {
    const std::vector<double> out = NetOut(b.net, f, i);
    const StreamRequest& r = b.net.streams()[i];
    for (NodeId v = 0; v < b.net.num_nodes(); ++v) {
      const double want = v == r.source ? f.rho_i[i] * b.net.DemandPackets(i)
                          : v == r.dest ? -f.rho_i[i] * b.net.DemandPackets(i)
                                        : 0.0;
      CHECK(out[v] == doctest::Approx(want).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("scaling demands scales rho when lambda is zero") {
  LpOptions pure;
  pure.lambda = 0.0;
  const auto xy = std::vector<std::pair<double, double>>{{0, 0}, {110, 0}, {220, 0}, {110, 110}};
  const Built one(MakeScenario(xy, {{0, 2}, {3, 1}}, 20.0));
  const Built two(MakeScenario(xy, {{0, 2}, {3, 1}}, 40.0));
  CHECK(Solve(two, pure).rho * 2 == doctest::Approx(Solve(one, pure).rho).epsilon(1e-7));
}

TEST_CASE("disconnected requests are rejected, not solved") {
  const Built b(MakeScenario({{0, 0}, {100, 0}, {2000, 0}}, {{0, 1}, {0, 2}}, 5.0));
  const LpInstance inst = BuildLp(b.net, &b.graph, {});
  CHECK_FALSE(inst.rejected[0]);
  CHECK(inst.rejected[1]);
  const MultiFlow f = SolveLp(inst);
  CHECK(f.rejected[1]);
  CHECK(f.rho_i[1] == 0.0);
  CHECK(f.rho > 0.0);
  CHECK_FALSE(Reachable(b.net, 0, 2));
  CHECK(Reachable(b.net, 0, 1));
}

TEST_CASE("a planted cycle is cancelled exactly") {
  // Square 0-1-2-3 plus the direct path 0->1.
  const Network net(MakeScenario({{0, 0}, {100, 0}, {100, 100}, {0, 100}}, {{0, 1}}));
  auto link = [&](NodeId u, NodeId v) {
    for (LinkId e : net.out_links(u)) {
      if (net.link(e).v == v && net.link(e).mcs == 0) return e;
    }
    FAIL("missing link");
    return -1;
  };
  MultiFlow f(1, 2, net.num_links());
  f.at(0, 0, link(0, 1)) = 12.0;
  // 5 packets around 1 -> 2 -> 3 -> 1? 3 and 1 are diagonal and out of range,
  // so use 0 -> 1 -> 2 -> 3 -> 0.
  for (auto [u, v] : {std::pair{0, 1}, {1, 2}, {2, 3}, {3, 0}}) f.at(0, 1, link(u, v)) += 5.0;
  RemoveCycles(net, f);
  CHECK(f.stream_flow(0, link(0, 1)) == doctest::Approx(12.0));
  CHECK(f.stream_flow(0, link(1, 2)) == doctest::Approx(0.0));
  CHECK(f.stream_flow(0, link(2, 3)) == doctest::Approx(0.0));
  CHECK(f.stream_flow(0, link(3, 0)) == doctest::Approx(0.0));
}

TEST_CASE("cycle removal fuzz: acyclic, conserving, never increasing") {
  std::mt19937_64 rng(99);
  const Network net(GenRandom(14, 1, 1.0, 5, 320.0));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> node(0, net.num_nodes() - 1);
  auto random_path = [&](NodeId a, NodeId b) {
    std::vector<bool> usable(net.num_links());
    for (auto&& x : usable) x = u01(rng) < 0.6;
    return ShortestLexPath(net, a, b, usable);
  };
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    MultiFlow f(1, 3, net.num_links());
    const NodeId a = net.streams()[0].source, b = net.streams()[0].dest;
    for (int p = 0; p < 4; ++p) {
      const double v = 1.0 + 10.0 * u01(rng);
      for (LinkId e : random_path(a, b)) f.at(0, p % 3, e) += v;
    }
    for (int c = 0; c < 3; ++c) {
      const NodeId x = node(rng), y = node(rng);
      if (x == y) continue;
      const auto there = random_path(x, y), back = random_path(y, x);
      if (there.empty() || back.empty()) continue;
      const double v = 1.0 + 5.0 * u01(rng);
      for (LinkId e : there) f.at(0, c, e) += v;
      for (LinkId e : back) f.at(0, (c + 1) % 3, e) += v;
    }
    const MultiFlow before = f;
    RemoveCycles(net, f);
    std::vector<double> agg(net.num_links());
    for (LinkId e = 0; e < net.num_links(); ++e) {
      agg[e] = f.stream_flow(0, e);
      for (int j = 0; j < 3; ++j) CHECK(f.at(0, j, e) <= before.at(0, j, e) + 1e-9);
    }
    CHECK_FALSE(HasCycle(net, agg));
    const auto n0 = NetOut(net, before, 0), n1 = NetOut(net, f, 0);
    for (NodeId v = 0; v < net.num_nodes(); ++v) CHECK(n1[v] == doctest::Approx(n0[v]).scale(1.0));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("rounding floors per path and conserves in integers") {
  const Network net(MakeScenario(LineXY(4, 100.0), {{0, 3}}));
  MultiFlow f(1, 1, net.num_links());
  std::vector<LinkId> path;
  for (NodeId x = 0; x < 3; ++x) {
    for (LinkId e : net.out_links(x)) {
      if (net.link(e).v == x + 1 && net.link(e).mcs == 0) path.push_back(e);
    }
  }
  for (LinkId e : path) f.at(0, 0, e) = 10.7;
  const MfTable mf = RoundToMf(net, f);
  for (LinkId e : path) CHECK(mf.at(e, 0) == 10);
  CHECK(mf.total() == 30);

  // Integral input is left alone.
  for (LinkId e : path) f.at(0, 0, e) = 9.0;
  const MfTable same = RoundToMf(net, f);
  for (LinkId e : path) CHECK(same.at(e, 0) == 9);
}

TEST_CASE("rounding on LP output: conservation and loss bound") {
  const Network net(GenRandom(16, 4, 8.0, 11, 400.0));
  const InterferenceIndex index = BuildInterferenceIndex(net);
  const ConflictGraph graph(net, index);
  MultiFlow f = SolveLp(BuildLp(net, &graph, {}));
  RemoveCycles(net, f);
  const MfTable mf = RoundToMf(net, f);
  for (int i = 0; i < net.num_streams(); ++i) {
    const StreamRequest& r = net.streams()[i];
    int positive = 0;
    for (LinkId e = 0; e < net.num_links(); ++e) {
      CHECK(mf.at(e, i) >= 0);
      CHECK(mf.at(e, i) <= f.stream_flow(i, e) + 1e-6);
      if (f.stream_flow(i, e) > 1e-9) ++positive;
    }
    for (NodeId v = 0; v < net.num_nodes(); ++v) {
      int in = 0, out = 0;
      for (LinkId e : net.in_links(v)) in += mf.at(e, i);
      for (LinkId e : net.out_links(v)) out += mf.at(e, i);
      if (v != r.source && v != r.dest) CHECK(in == out);
    }
    int sent = 0;
    for (LinkId e : net.out_links(r.source)) sent += mf.at(e, i);
    const double lp = f.rho_i[i] * net.DemandPackets(i);
    // Every extracted path exhausts a link, so there are at most `positive`
    // of them, each losing less than one packet.
    CHECK(lp - sent >= -1e-6);
    CHECK(lp - sent <= positive + 1e-6);
  }
}

TEST_CASE("path decomposition peels bottleneck-sized paths") {
  const Network net(MakeScenario(LineXY(3, 100.0), {{0, 2}}));
  std::vector<LinkId> hops;
  for (NodeId x = 0; x < 2; ++x) {
    LinkId best = -1;
    for (LinkId e : net.out_links(x)) {
      if (net.link(e).v == x + 1 && (best < 0 || net.link(e).pps > net.link(best).pps)) best = e;
    }
    hops.push_back(best);
  }
  const int pps = std::min(net.link(hops[0]).pps, net.link(hops[1]).pps);
  MfTable mf(net.num_links(), 1);
  for (LinkId e : hops) mf.at(e, 0) = 3 * pps;
  const FlowPathSet ps = DecomposePaths(net, mf);
  REQUIRE(ps.paths[0].size() == 3);
  for (const FlowPath& p : ps.paths[0]) {
    CHECK(p.val == pps);
    CHECK(p.links == hops);
  }

  // Flow that does not reach the sink is an internal error.
  MfTable broken(net.num_links(), 1);
  broken.at(hops[1], 0) = 4;
  CHECK_THROWS_AS(DecomposePaths(net, broken), ConsistencyError);
}

TEST_CASE("two disjoint paths are peeled independently in discovery order") {
  // 0 -> 1 -> 3 and 0 -> 2 -> 3, diamond with 100 m sides at 45 degrees.
  const double h = 100.0 / std::sqrt(2.0);
  const Network net(MakeScenario({{0, 0}, {h, h}, {h, -h}, {2 * h, 0}}, {{0, 3}}));
  auto link = [&](NodeId u, NodeId v) {
    for (LinkId e : net.out_links(u)) {
      if (net.link(e).v == v && net.link(e).mcs == 0) return e;
    }
    return -1;
  };
  MfTable mf(net.num_links(), 1);
  mf.at(link(0, 1), 0) = mf.at(link(1, 3), 0) = 1;
  mf.at(link(0, 2), 0) = mf.at(link(2, 3), 0) = 1;
  const FlowPathSet ps = DecomposePaths(net, mf);
  REQUIRE(ps.paths[0].size() == 2);
  CHECK(ps.paths[0][0].links == std::vector<LinkId>{link(0, 1), link(1, 3)});
  CHECK(ps.paths[0][1].links == std::vector<LinkId>{link(0, 2), link(2, 3)});
}
