#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/error.h"
#include "vidmesh/simulator.h"

using namespace vidmesh;
using vidmesh::testing::LineXY;
using vidmesh::testing::MakeScenario;
using vidmesh::testing::SinrOracle;

namespace {

struct Built {
  explicit Built(Scenario sc) : net(sc), index(BuildInterferenceIndex(net)), graph(net, index) {}
  Network net;
  InterferenceIndex index;
  ConflictGraph graph;
};

LinkId Best(const Network& net, NodeId u, NodeId v) {
  LinkId best = -1;
  for (LinkId e : net.out_links(u)) {
    if (net.link(e).v == v && (best < 0 || net.link(e).pps > net.link(best).pps)) best = e;
  }
  return best;
}

void CheckConservation(const SimMetrics& m) {
  for (size_t s = 0; s < m.streams.size(); ++s) {
    const StreamStats& st = m.streams[s];
    CAPTURE(s);
    CHECK(st.generated ==
          st.delivered + st.queue_dropped + st.sinr_lost + st.per_lost + m.in_flight[s]);
    int64_t wg = 0, wd = 0;
    for (const WindowStats& w : st.windows) {
      wg += w.generated;
      wd += w.delivered;
    }
    CHECK(wg == st.generated);
    CHECK(wd == st.delivered);
  }
}

struct TablePlan {
  ScheduleTable table;
  MfTable mf;
};

TablePlan PeelPlan(const Built& b) {
  MultiFlow f = SolveLp(BuildLp(b.net, &b.graph, {}));
  RemoveCycles(b.net, f);
  PeelResult r = PathPeelSchedule(b.net, b.graph, DecomposePaths(b.net, RoundToMf(b.net, f)));
  return {std::move(r.table), std::move(r.mf)};
}

}  // namespace

TEST_CASE("slot adjudication matches the SINR definition") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.0, 450.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<double, double>> xy;
    for (int i = 0; i < 10; ++i) xy.emplace_back(pos(rng), pos(rng));
    const Network net(MakeScenario(xy, {{0, 1}}));
    if (net.num_links() < 4) continue;
    std::vector<Transmission> active;
    std::vector<bool> used(net.num_nodes(), false);
    std::uniform_int_distribution<LinkId> pick(0, net.num_links() - 1);
    std::uniform_int_distribution<int> freq(0, 1);
    for (int x = 0; x < 8; ++x) {
      const Link& l = net.link(pick(rng));
      if (used[l.u] || used[l.v]) continue;
      used[l.u] = used[l.v] = true;
      active.push_back({l.id, freq(rng)});
    }
    const std::vector<Verdict> got = AdjudicateSlot(net, active);
    const std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
    for (size_t a = 0; a < active.size(); ++a) {
      const Link& l = net.link(active[a].link);
      std::vector<NodeId> senders, ends;
      for (size_t b = 0; b < active.size(); ++b) {
        if (b == a || active[b].freq != active[a].freq) continue;
        senders.push_back(net.link(active[b].link).u);
        ends.push_back(net.link(active[b].link).u);
        ends.push_back(net.link(active[b].link).v);
      }
      const std::vector<NodeId> s(senders.begin(), senders.end());
      const std::vector<NodeId> en(ends.begin(), ends.end());
      CHECK(got[a].forward ==
            (SinrOracle(net.radio(), nodes, l.u, l.v, s) >= net.mcs().at(l.mcs).beta));
      CHECK(got[a].reverse ==
            (SinrOracle(net.radio(), nodes, l.v, l.u, en) >= net.mcs().beta0()));
    }
  }
}

TEST_CASE("adjudication: channels isolate, neighbours collide") {
  const Network net(MakeScenario({{0, 0}, {100, 0}, {160, 0}, {260, 0}}, {{0, 1}}));
  const LinkId a = Best(net, 0, 1), c = Best(net, 2, 3);
  const Transmission alone[] = {{a, 0}};
  CHECK(AdjudicateSlot(net, alone)[0].ok());
  const Transmission split[] = {{a, 0}, {c, 1}};
  for (const Verdict& v : AdjudicateSlot(net, split)) CHECK(v.ok());
  const Transmission clash[] = {{a, 0}, {c, 0}};
  CHECK_FALSE(AdjudicateSlot(net, clash)[0].ok());
}

TEST_CASE("a chain below capacity delivers its whole demand") {
  // 1 Mbps over three 100 m hops.
  const Built b(MakeScenario(LineXY(4, 100.0), {{0, 3}}, 1.0));
  const TablePlan p = PeelPlan(b);
  SimConfig cfg;
  cfg.duration_s = 10.0;
  const SimMetrics m = RunScheduled(b.net, p.table, p.mf, cfg);
  CheckConservation(m);
  const StreamStats& st = m.streams[0];
  CHECK(st.generated == 64 * 10);
  CHECK(st.queue_dropped == 0);
  CHECK(st.sinr_lost == 0);
  CHECK(m.sinr_failures == 0);
  CHECK(st.delivered >= st.generated - 64);
  CHECK(st.hop_sum == 3 * st.delivered);
  CHECK(m.slots == 2000);
}

TEST_CASE("conservation and determinism on LP plans") {
  const Built b(GenRandom(16, 5, 6.0, 21, 420.0));
  const TablePlan p = PeelPlan(b);
  SimConfig cfg;
  cfg.duration_s = 6.0;
  const SimMetrics m1 = RunScheduled(b.net, p.table, p.mf, cfg);
  const SimMetrics m2 = RunScheduled(b.net, p.table, p.mf, cfg);
  CheckConservation(m1);
  CHECK(m1.sinr_failures == 0);
  for (size_t s = 0; s < m1.streams.size(); ++s) {
    CHECK(m1.streams[s].delivered == m2.streams[s].delivered);
    CHECK(m1.streams[s].delay_sum_s == m2.streams[s].delay_sum_s);
  }
  CHECK(m1.queues.size() == m2.queues.size());

  SimConfig noisy = cfg;
  noisy.adjudication = Adjudication::kStochastic;
  noisy.per = 0.05;
  const SimMetrics n1 = RunScheduled(b.net, p.table, p.mf, noisy);
  CheckConservation(n1);
  noisy.seed = 2;
  const SimMetrics n2 = RunScheduled(b.net, p.table, p.mf, noisy);
  CheckConservation(n2);
  int64_t lost1 = 0, lost2 = 0;
  for (size_t s = 0; s < n1.streams.size(); ++s) {
    lost1 += n1.streams[s].per_lost;
    lost2 += n2.streams[s].per_lost;
  }
  CHECK(lost1 > 0);
  CHECK(lost1 != lost2);

  SimConfig lossy = cfg;
  lossy.fc_message_loss = 0.3;
  CheckConservation(RunScheduled(b.net, p.table, p.mf, lossy));
  SimConfig open = cfg;
  open.flow_control = false;
  const SimMetrics o = RunScheduled(b.net, p.table, p.mf, open);
  CheckConservation(o);
  CHECK(o.queues.empty());
}

TEST_CASE("a cell holding colliding links loses packets") {
  const Built b(MakeScenario({{0, 0}, {100, 0}, {160, 0}, {260, 0}}, {{0, 1}, {2, 3}}, 1.0));
  const LinkId a = Best(b.net, 0, 1), c = Best(b.net, 2, 3);
  ScheduleTable t(b.net.radio().num_freq, b.net.radio().num_slots);
  for (int s = 0; s < 100; ++s) {
    t.Add(0, s, a);
    t.Add(0, s, c);
  }
  MfTable mf(b.net.num_links(), 2);
  mf.at(a, 0) = mf.at(c, 1) = 64;
  SimConfig cfg;
  cfg.duration_s = 3.0;
  const SimMetrics m = RunScheduled(b.net, t, mf, cfg);
  CheckConservation(m);
  CHECK(m.sinr_failures > 0);
  CHECK(m.streams[0].sinr_lost + m.streams[1].sinr_lost > 0);
}

TEST_CASE("unscheduled runs conserve packets and honour radios") {
  const Built b(GenRandom(14, 4, 3.0, 5, 400.0));
  const std::vector<Route> routes = ShortpRoute(b.net, ChannelPolicy::kRoundRobin, 5);
  for (int radios : {1, b.net.radio().num_freq}) {
    SimConfig cfg;
    cfg.duration_s = 5.0;
    cfg.radios_per_node = radios;
    const SimMetrics m = RunUnscheduled(b.net, b.graph, routes, cfg);
    CheckConservation(m);
    int64_t delivered = 0;
    for (const StreamStats& st : m.streams) delivered += st.delivered;
    CHECK(delivered > 0);
    const SimMetrics again = RunUnscheduled(b.net, b.graph, routes, cfg);
    for (size_t s = 0; s < m.streams.size(); ++s) {
      CHECK(again.streams[s].delivered == m.streams[s].delivered);
    }
  }
  SimConfig bad;
  bad.duration_s = 5.0;
  bad.radios_per_node = 2;
  CHECK_THROWS_AS(RunUnscheduled(b.net, b.graph, routes, bad), InputError);
}

TEST_CASE("configuration checks") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.Validate(200, 0.005));
  cfg.duration_s = 2.5;
  CHECK_THROWS_AS(cfg.Validate(200, 0.005), InputError);
  cfg.duration_s = 0.0;
  CHECK_THROWS_AS(cfg.Validate(200, 0.005), InputError);
  cfg = SimConfig{};
  cfg.per = 0.2;
  CHECK_THROWS_AS(cfg.Validate(200, 0.005), InputError);
  cfg = SimConfig{};
  cfg.fc_message_loss = 1.5;
  CHECK_THROWS_AS(cfg.Validate(200, 0.005), InputError);

  const Network net(MakeScenario(LineXY(2, 100.0), {{0, 1}}));
  ScheduleTable t(3, 200);
  SimConfig two;
  two.radios_per_node = 2;
  CHECK_THROWS_AS(RunScheduled(net, t, MfTable(net.num_links(), 1), two), InputError);
}
