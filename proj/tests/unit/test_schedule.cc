#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/error.h"
#include "vidmesh/schedule.h"

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

LinkId Best(const Network& net, NodeId u, NodeId v) {
  LinkId best = -1;
  for (LinkId e : net.out_links(u)) {
    if (net.link(e).v == v && (best < 0 || net.link(e).pps > net.link(best).pps)) best = e;
  }
  return best;
}

// Independent support check: node-disjoint slots, conflict-free cells and
// mf within the placed capacity.
bool Supports(const Network& net, const ConflictGraph& g, const ScheduleTable& a,
              const MfTable& mf) {
  std::vector<int> occ(net.num_links(), 0);
  for (int t = 0; t < a.num_slots(); ++t) {
    std::set<NodeId> busy;
    for (int j = 0; j < a.num_freq(); ++j) {
      const auto& cell = a.cell(j, t);
      for (LinkId e : cell) {
        ++occ[e];
        if (!busy.insert(net.link(e).u).second) return false;
        if (!busy.insert(net.link(e).v).second) return false;
        for (LinkId o : cell) {
          if (o != e && g.Conflicts(e, o)) return false;
        }
      }
    }
  }
  for (LinkId e = 0; e < net.num_links(); ++e) {
    int load = 0;
    for (int s = 0; s < mf.num_streams(); ++s) load += mf.at(e, s);
    if (load > occ[e] * net.link(e).pps) return false;
  }
  return true;
}

// Slot of the first placement of e on any channel, or -1.
int SlotOf(const ScheduleTable& a, LinkId e) {
  for (int t = 0; t < a.num_slots(); ++t) {
    for (int j = 0; j < a.num_freq(); ++j) {
      const auto& c = a.cell(j, t);
      if (std::find(c.begin(), c.end(), e) != c.end()) return t;
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("schedule table bookkeeping") {
  ScheduleTable a(2, 3);
  a.Add(0, 1, 7);
  a.Add(1, 2, 7);
  a.Add(1, 2, 4);
  CHECK(a.Occurrences(7) == 2);
  CHECK(a.Placements() == 3);
  a.Remove(1, 2, 7);
  CHECK(a.Occurrences(7) == 1);
  CHECK(a.AppendSlot() == 3);
  CHECK(a.num_slots() == 4);
  CHECK(a.cell(0, 3).empty());
  CHECK_THROWS_AS(ScheduleTable(0, 3), InputError);
}

TEST_CASE("greedy: placements plus deficit equal the asked slots") {
  // Two hops through node 1 on one channel, each asking for 60% of the
  // period: the second in order gets the leftover 40%.
  Scenario sc = MakeScenario(LineXY(3, 100.0), {{0, 2}});
  const Built b(sc);
  const int T = b.net.radio().num_slots;
  const LinkId h0 = Best(b.net, 0, 1), h1 = Best(b.net, 1, 2);
  MultiFlow f(1, b.net.radio().num_freq, b.net.num_links());
  f.at(0, 0, h0) = 0.6 * b.net.link(h0).cap;
  f.at(0, 0, h1) = 0.6 * b.net.link(h1).cap;
  const MfTable target = RoundToMf(b.net, f);
  const GreedyResult g = GreedySchedule(b.net, b.graph, f, target);
  const LinkId first = std::min(h0, h1), second = std::max(h0, h1);
  CHECK(g.table.Occurrences(first) == T * 6 / 10);
  CHECK(g.table.Occurrences(second) == T * 4 / 10);
  REQUIRE(g.deficit.size() == 1);
  CHECK(g.deficit[0].link == second);
  CHECK(g.deficit[0].slots == T * 2 / 10);
  CHECK(g.deficit_slots() == T * 2 / 10);
  CHECK(Supports(b.net, b.graph, g.table, g.mf));
  CHECK(VerifySupport(b.net, b.graph, g.table, g.mf).ok);
  // The short hop limits what mf can carry there.
  CHECK(g.mf.at(second, 0) == g.table.Occurrences(second) * b.net.link(second).pps);
}

TEST_CASE("greedy fuzz on LP output: supported, and mf equals the target where covered") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    const Built b(GenRandom(14, 3, 1.0 + seed % 4, seed, 380.0));
    MultiFlow f = SolveLp(BuildLp(b.net, &b.graph, {}));
    RemoveCycles(b.net, f);
    const MfTable target = RoundToMf(b.net, f);
    const GreedyResult g = GreedySchedule(b.net, b.graph, f, target);
    CAPTURE(seed);
    CHECK(Supports(b.net, b.graph, g.table, g.mf));
    CHECK(VerifySupport(b.net, b.graph, g.table, g.mf).ok);
    const int F = b.net.radio().num_freq;
    for (LinkId e = 0; e < b.net.num_links(); ++e) {
      int asked = 0;
      for (int j = 0; j < F; ++j) asked += g.wanted[static_cast<size_t>(e) * F + j];
      int missing = 0;
      for (const Deficit& d : g.deficit) {
        if (d.link == e) missing += d.slots;
      }
      CHECK(g.table.Occurrences(e) + missing == asked);
      for (int s = 0; s < target.num_streams(); ++s) CHECK(g.mf.at(e, s) <= target.at(e, s));
    }
    // Per-channel floors can leave less than the target even without a
    // deficit; wherever the placed capacity covers it, mf is the target.
    for (LinkId e = 0; e < b.net.num_links(); ++e) {
      if (target.link_total(e) > g.table.Occurrences(e) * b.net.link(e).pps) continue;
      for (int s = 0; s < target.num_streams(); ++s) CHECK(g.mf.at(e, s) == target.at(e, s));
    }
  }
}

TEST_CASE("augmenting places every deficit slot") {
  const Built b(MakeScenario(LineXY(3, 100.0), {{0, 2}}));
  const int T = b.net.radio().num_slots;
  const LinkId h0 = Best(b.net, 0, 1), h1 = Best(b.net, 1, 2);
  MultiFlow f(1, b.net.radio().num_freq, b.net.num_links());
  f.at(0, 0, h0) = 0.6 * b.net.link(h0).cap;
  f.at(0, 0, h1) = 0.6 * b.net.link(h1).cap;
  const MfTable target = RoundToMf(b.net, f);
  GreedyResult g = GreedySchedule(b.net, b.graph, f, target);
  const int64_t missing = g.deficit_slots();
  REQUIRE(missing > 0);
  const AugmentResult aug = AugmentSchedule(b.net, b.graph, target, g);
  CHECK(g.deficit.empty());
  CHECK(aug.added_slots == missing);  // the two hops share node 1
  CHECK(aug.period == T + aug.added_slots);
  CHECK(aug.dilution == doctest::Approx(static_cast<double>(T) / aug.period));
  CHECK(g.table.Occurrences(h0) == T * 6 / 10);
  CHECK(g.table.Occurrences(h1) == T * 6 / 10);
  CHECK(Supports(b.net, b.graph, g.table, g.mf));
  for (LinkId e : {h0, h1}) CHECK(g.mf.at(e, 0) == target.at(e, 0));
}

TEST_CASE("path peeling puts a chain in consecutive slots") {
  const Built b(MakeScenario(LineXY(4, 100.0), {{0, 3}}));
  const std::vector<LinkId> path = {Best(b.net, 0, 1), Best(b.net, 1, 2), Best(b.net, 2, 3)};
  FlowPathSet ps;
  ps.paths.resize(1);
  ps.paths[0].push_back({0, path, 3});
  const PeelResult r = PathPeelSchedule(b.net, b.graph, ps);
  REQUIRE(r.paths_placed == 1);
  CHECK(SlotOf(r.table, path[0]) == 0);
  CHECK(SlotOf(r.table, path[1]) == 1);
  CHECK(SlotOf(r.table, path[2]) == 2);
  for (LinkId e : path) CHECK(r.mf.at(e, 0) == 3);
  CHECK(r.ScheduledFraction() == doctest::Approx(1.0));
  CHECK(Supports(b.net, b.graph, r.table, r.mf));
}

TEST_CASE("path peeling on LP paths: supported and conserving") {
  const Built b(GenRandom(16, 4, 4.0, 3, 420.0));
  MultiFlow f = SolveLp(BuildLp(b.net, &b.graph, {}));
  RemoveCycles(b.net, f);
  const FlowPathSet ps = DecomposePaths(b.net, RoundToMf(b.net, f));
  const PeelResult r = PathPeelSchedule(b.net, b.graph, ps);
  CHECK(Supports(b.net, b.graph, r.table, r.mf));
  CHECK(VerifySupport(b.net, b.graph, r.table, r.mf).ok);
  CHECK(r.paths_placed <= r.paths_total);
  for (int i = 0; i < b.net.num_streams(); ++i) {
    CHECK(r.scheduled[i] <= r.wanted[i]);
    // Conservation of the placed mf at relays.
    for (NodeId v = 0; v < b.net.num_nodes(); ++v) {
      const StreamRequest& req = b.net.streams()[i];
      if (v == req.source || v == req.dest) continue;
      int in = 0, out = 0;
      for (LinkId e : b.net.in_links(v)) in += r.mf.at(e, i);
      for (LinkId e : b.net.out_links(v)) out += r.mf.at(e, i);
      CHECK(in == out);
    }
  }
}

TEST_CASE("a path that does not fit is rolled back") {
  Scenario sc = MakeScenario(LineXY(3, 100.0), {{0, 2}});
  sc.radio.num_slots = 1;
  sc.radio.num_freq = 1;
  const Built b(sc);
  FlowPathSet ps;
  ps.paths.resize(1);
  ps.paths[0].push_back({0, {Best(b.net, 0, 1), Best(b.net, 1, 2)}, 1});
  const PeelResult r = PathPeelSchedule(b.net, b.graph, ps);
  CHECK(r.paths_placed == 0);
  CHECK(r.table.Placements() == 0);
  CHECK(r.mf.total() == 0);
  CHECK(r.ScheduledFraction() == 0.0);
}

TEST_CASE("fixed channel choice") {
  const Built b(MakeScenario(LineXY(3, 100.0), {{0, 2}}));
  FlowPathSet ps;
  ps.paths.resize(1);
  ps.paths[0].push_back({0, {Best(b.net, 0, 1), Best(b.net, 1, 2)}, 2});
  PeelOptions o;
  o.freq_choice = FreqChoice::kFixed;
  o.stream_freq = {2};
  const PeelResult r = PathPeelSchedule(b.net, b.graph, ps, o);
  CHECK(r.paths_placed == 1);
  for (int t = 0; t < r.table.num_slots(); ++t) {
    CHECK(r.table.cell(0, t).empty());
    CHECK(r.table.cell(1, t).empty());
  }
  o.stream_freq.clear();
  CHECK_THROWS_AS(PathPeelSchedule(b.net, b.graph, ps, o), InputError);
}

TEST_CASE("routes split into bottleneck-sized paths") {
  const Network net(MakeScenario(LineXY(3, 100.0), {{0, 2}}));
  Route r;
  r.links = {Best(net, 0, 1), Best(net, 1, 2)};
  const int pps = std::min(net.link(r.links[0]).pps, net.link(r.links[1]).pps);
  r.weight = 2 * pps + 1;
  const FlowPathSet ps = RoutesToPaths(net, {r});
  REQUIRE(ps.paths[0].size() == 3);
  CHECK(ps.paths[0][0].val == pps);
  CHECK(ps.paths[0][1].val == pps);
  CHECK(ps.paths[0][2].val == 1);
}

TEST_CASE("support verification flags each violation kind") {
  // Two disjoint 100 m pairs 150 m apart on a line interfere strongly.
  const Built b(MakeScenario({{0, 0}, {100, 0}, {250, 0}, {350, 0}}, {{0, 1}}));
  const LinkId a = Best(b.net, 0, 1), c = Best(b.net, 2, 3), back = Best(b.net, 1, 0);
  REQUIRE(b.graph.Conflicts(a, c));
  MfTable mf(b.net.num_links(), 1);

  ScheduleTable ok(2, 2);
  ok.Add(0, 0, a);
  ok.Add(1, 0, c);
  mf.at(a, 0) = b.net.link(a).pps;
  CHECK(VerifySupport(b.net, b.graph, ok, mf).ok);

  auto kinds = [&](const ScheduleTable& t, const MfTable& m) {
    std::set<SupportViolation::Kind> out;
    for (const auto& v : VerifySupport(b.net, b.graph, t, m).violations) {
      out.insert(v.kind);
      CHECK_FALSE(v.Describe(b.net).empty());
    }
    return out;
  };
  MfTable heavy = mf;
  heavy.at(a, 0) = b.net.link(a).pps + 1;
  CHECK(kinds(ok, heavy) == std::set{SupportViolation::Kind::kCapacity});
  CHECK_FALSE(VerifySupport(b.net, b.graph, ok, heavy).ok);

  ScheduleTable radio(2, 1);
  radio.Add(0, 0, a);
  radio.Add(1, 0, back);
  CHECK(kinds(radio, mf).count(SupportViolation::Kind::kRadio) == 1);

  ScheduleTable conflict(2, 1);
  conflict.Add(0, 0, a);
  conflict.Add(0, 0, c);
  CHECK(kinds(conflict, mf) == std::set{SupportViolation::Kind::kConflict});
}

TEST_CASE("table and mf CSV round trip") {
  const Built b(GenRandom(12, 3, 2.0, 8, 350.0));
  MultiFlow f = SolveLp(BuildLp(b.net, &b.graph, {}));
  RemoveCycles(b.net, f);
  const MfTable target = RoundToMf(b.net, f);
  GreedyResult g = GreedySchedule(b.net, b.graph, f, target);
  g.table.AppendSlot();
  g.table.Add(1, g.table.num_slots() - 1, 0);

  std::stringstream ts, ms;
  WriteTableCsv(ts, b.net, g.table);
  WriteMfCsv(ms, g.mf);
  const ScheduleTable t2 = ReadTableCsv(ts, b.net, b.net.radio().num_slots);
  const MfTable m2 = ReadMfCsv(ms, b.net);
  REQUIRE(t2.num_slots() == g.table.num_slots());
  for (int t = 0; t < t2.num_slots(); ++t) {
    for (int j = 0; j < t2.num_freq(); ++j) {
      std::vector<LinkId> x = g.table.cell(j, t), y = t2.cell(j, t);
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      CHECK(x == y);
    }
  }
  for (LinkId e = 0; e < b.net.num_links(); ++e) {
    for (int s = 0; s < g.mf.num_streams(); ++s) CHECK(m2.at(e, s) == g.mf.at(e, s));
  }

  std::stringstream bad("freq,slot,link,u,v,mcs\n0,0,99999,0,1,0\n");
  CHECK_THROWS_AS(ReadTableCsv(bad, b.net, 200), InputError);
  std::stringstream junk("link,stream,packets\nx,y,z\n");
  CHECK_THROWS_AS(ReadMfCsv(junk, b.net), InputError);
}
