// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// pass criterion numbers to run a subset.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "vidmesh/harness.h"

namespace vidmesh {
namespace {

namespace fs = std::filesystem;
using testing::LineXY;

// Pinned tolerances.
constexpr uint64_t kSeed = 1;
constexpr double kRunSeconds = 25.0;
constexpr double kMaxScenarioSeconds = 120.0;
constexpr int kGreedyFuzzCases = 1000;
constexpr double kMinPeelCoverage = 0.60;
constexpr double kMaxWindowDrop = 0.01;
constexpr double kMaxQueueToRin = 2.0;
constexpr double kMinUnscheduledDropPct = 10.0;
constexpr double kCircleShare = 0.8;
constexpr double kLpOracleTol = 1e-4;
constexpr int kCycleFuzzCases = 50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Scenario contexts and runs are shared between criteria.
const Context& Ctx(const std::string& name, int k) {
  static std::map<std::pair<std::string, int>, std::unique_ptr<Context>> cache;
  auto& slot = cache[{name, k}];
  if (!slot) {
    slot = std::make_unique<Context>(name == "grid" ? GenGrid(k, 10.0, kSeed)
                                                    : GenCircle(k, 10.0));
  }
  return *slot;
}

struct Run {
  PlanResult plan;
  SimMetrics metrics;
  Summary summary;
  double seconds = 0.0;
};

const Run& RunWith(const std::string& name, int k, const Wiring& wiring, const std::string& tag) {
  static std::map<std::string, std::unique_ptr<Run>> cache;
  const std::string key = name + "/" + std::to_string(k) + "/" + tag;
  auto& slot = cache[key];
  if (!slot) {
    const auto t0 = std::chrono::steady_clock::now();
    const Context& ctx = Ctx(name, k);
    slot = std::make_unique<Run>();
    slot->plan = PlanWith(ctx, wiring, kSeed);
    SimConfig cfg;
    cfg.duration_s = kRunSeconds;
    cfg.seed = kSeed;
    slot->metrics = Simulate(ctx, slot->plan, cfg);
    slot->summary = Summarize(slot->metrics, ctx.net.radio());
    slot->seconds = Seconds(t0);
  }
  return *slot;
}

const Run& RunVariant(const std::string& name, int k, Variant v) {
  return RunWith(name, k, WiringOf(v), VariantName(v));
}

// Best capacity on u->v among links the LP keeps: the lowest MCS, or any
// MCS whose clean SNR clears its threshold with the margin.
int KeptCap(const Network& net, NodeId u, NodeId v) {
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

// Conflict-row loads written from the definition: per (e, j), the load of
// e and its conflicting links on j plus the load of e and its
// node-sharing links on every other channel, each as a fraction of c.
double MaxRowLoad(const Network& net, const ConflictGraph& g,
                  const std::vector<std::vector<double>>& x) {
  const int F = static_cast<int>(x.size());
  auto shares = [&](const Link& a, const Link& b) {
    return a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
  };
  double worst = 0.0;
  for (const Link& e : net.links()) {
    for (int j = 0; j < F; ++j) {
      double row = 0.0;
      for (const Link& o : net.links()) {
        if (o.id == e.id || g.Conflicts(e.id, o.id)) row += x[j][o.id];
        for (int jj = 0; jj < F; ++jj) {
          if (jj == j) continue;
          if (o.id == e.id || shares(e, o)) row += x[jj][o.id];
        }
      }
      worst = std::max(worst, row);
    }
  }
  return worst;
}

// Independent table check: node-disjoint slots, conflict-free cells and
// mf within placed capacity.
bool TableSupports(const Network& net, const ConflictGraph& g, const ScheduleTable& a,
                   const MfTable& mf) {
  std::vector<int> occ(net.num_links(), 0);
  for (int t = 0; t < a.num_slots(); ++t) {
    std::set<NodeId> busy;
    for (int j = 0; j < a.num_freq(); ++j) {
      for (LinkId e : a.cell(j, t)) {
        ++occ[e];
        if (!busy.insert(net.link(e).u).second || !busy.insert(net.link(e).v).second) {
          return false;
        }
        for (LinkId o : a.cell(j, t)) {
          if (o != e && g.Conflicts(e, o)) return false;
        }
      }
    }
  }
  for (LinkId e = 0; e < net.num_links(); ++e) {
    if (mf.link_total(e) > occ[e] * net.link(e).pps) return false;
  }
  return true;
}

std::vector<int64_t> SourceOutflow(const Network& net, const MfTable& mf) {
  std::vector<int64_t> out(net.num_streams(), 0);
  for (int s = 0; s < net.num_streams(); ++s) {
    for (LinkId e : net.out_links(net.streams()[s].source)) out[s] += mf.at(e, s);
    for (LinkId e : net.in_links(net.streams()[s].source)) out[s] -= mf.at(e, s);
  }
  return out;
}

Outcome SinrFeasibility() {
  Outcome o{true, ""};
  const std::pair<const char*, int> cases[] = {{"grid", 8}, {"grid", 12}, {"grid", 16},
                                               {"circle", 12}};
  for (auto [name, k] : cases) {
    const Run& r = RunVariant(name, k, Variant::kMfIS);
    const bool ok = r.metrics.sinr_failures == 0 && r.plan.support.ok &&
                    r.seconds < kMaxScenarioSeconds;
    o.pass = o.pass && ok;
    o.detail += Fmt("%s k=%d: %lld failures of %lld tx in %.1fs; ", name, k,
                    static_cast<long long>(r.metrics.sinr_failures),
                    static_cast<long long>(r.metrics.transmissions), r.seconds);
  }
  return o;
}

Outcome GreedyGuarantee() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int failures = 0, nontrivial = 0;
  int64_t placed = 0;
  for (int c = 0; c < kGreedyFuzzCases; ++c) {
    const int n = 3 + static_cast<int>(rng() % 10);  // 3..12 nodes
    const double side = 150.0 + 350.0 * u01(rng);
    Scenario sc = GenRandom(n, 1, 1.0, rng(), side);
    const Network net(sc);
    if (net.num_links() == 0) continue;
    const InterferenceIndex index = BuildInterferenceIndex(net);
    const ConflictGraph graph(net, index);
    const int F = net.radio().num_freq;
    std::vector<std::vector<double>> x(F, std::vector<double>(net.num_links(), 0.0));
    const double density = 0.2 + 0.6 * u01(rng);
    for (int j = 0; j < F; ++j) {
      for (LinkId e = 0; e < net.num_links(); ++e) {
        if (u01(rng) < density) x[j][e] = u01(rng);
      }
    }
    const double worst = MaxRowLoad(net, graph, x);
    if (worst <= 0.0) continue;
    // Scale onto the boundary of the feasible region.
    MultiFlow flow(1, F, net.num_links());
    for (int j = 0; j < F; ++j) {
      for (LinkId e = 0; e < net.num_links(); ++e) {
        flow.at(0, j, e) = x[j][e] / worst * net.link(e).cap;
      }
    }
    const GreedyResult g = GreedySchedule(net, graph, flow, MfTable(net.num_links(), 1));
    placed += g.table.Placements();
    ++nontrivial;
    if (g.deficit_slots() > 0 || !TableSupports(net, graph, g.table, g.mf)) ++failures;
  }
  return {failures == 0 && nontrivial > kGreedyFuzzCases / 2,
          Fmt("%d of %d flows failed, %lld slots placed", failures, nontrivial,
              static_cast<long long>(placed))};
}

Outcome PeelCoverage() {
  const auto t0 = std::chrono::steady_clock::now();
  const PlanResult plan = Plan(Ctx("grid", 12), Variant::kMfIS, kSeed);
  const double secs = Seconds(t0);
  const double frac = plan.scheduled_flow / plan.lp_flow;
  return {frac >= kMinPeelCoverage && secs < 60.0 && plan.support.ok,
          Fmt("scheduled %lld of %.1f packets/period (%.1f%%, need %.0f%%) in %.1fs",
              static_cast<long long>(plan.scheduled_flow), plan.lp_flow, 100 * frac,
              100 * kMinPeelCoverage, secs)};
}

Outcome DelayOrdering() {
  Wiring greedy = WiringOf(Variant::kMfIS);
  greedy.scheduler = SchedulerMode::kGreedy;
  const Run& peel = RunVariant("grid", 12, Variant::kMfIS);
  const Run& gr = RunWith("grid", 12, greedy, "greedy");
  const bool grid_ok = peel.summary.delay_max_s < gr.summary.delay_max_s;

  // Five 140 m hops into node 0 carrying one stream below capacity. One
  // channel keeps the hops serialized, and rho is capped so the flow does
  // not stretch to fill the whole period.
  Scenario sc = testing::MakeScenario(LineXY(6, 140.0), {{5, 0}}, 0.5);
  sc.radio.num_freq = 1;
  const Context chain(sc);
  PlanOptions capped;
  capped.lp.cap_rho = true;
  SimConfig cfg;
  cfg.duration_s = kRunSeconds;
  cfg.seed = kSeed;
  const double slot = chain.net.radio().slot_duration_s;
  const double period = chain.net.radio().PeriodSeconds();
  const PlanResult pp = Plan(chain, Variant::kMfIS, kSeed, capped);
  const PlanResult gp = PlanWith(chain, greedy, kSeed, capped);
  const Summary ps = Summarize(Simulate(chain, pp, cfg), chain.net.radio());
  const Summary gs = Summarize(Simulate(chain, gp, cfg), chain.net.radio());
  const bool chain_ok = ps.delay_max_s <= 5 * slot + period + 1e-9 &&
                        gs.delay_max_s >= 4 * period - 1e-9;
  return {grid_ok && chain_ok,
          Fmt("grid k=12 max delay peel %.3fs vs greedy %.3fs; chain peel %.3fs (limit %.3fs), "
              "greedy %.3fs (floor %.3fs)",
              peel.summary.delay_max_s, gr.summary.delay_max_s, ps.delay_max_s,
              5 * slot + period, gs.delay_max_s, 4 * period)};
}

Outcome MinThroughput() {
  Outcome o{true, ""};
  for (int k : {8, 12, 16}) {
    const double mf = RunVariant("grid", k, Variant::kMfIS).summary.thr_min_mbps;
    const double sp = RunVariant("grid", k, Variant::kShortPS).summary.thr_min_mbps;
    o.pass = o.pass && mf > sp;
    o.detail += Fmt("k=%d MF-I-S %.3f vs ShortP-S %.3f Mbps; ", k, mf, sp);
  }
  return o;
}

Outcome FlowControlStability() {
  const Run& r = RunVariant("grid", 12, Variant::kMfIS);
  double worst = 0.0;
  for (const StreamSummary& s : r.summary.streams) worst = std::max(worst, s.worst_window_drop);
  const double q = MaxQueueToRin(r.metrics);
  return {worst <= kMaxWindowDrop && q <= kMaxQueueToRin,
          Fmt("worst window drop %.4f (limit %.2f), max |Q|/R_in %.3f (limit %.1f)", worst,
              kMaxWindowDrop, q, kMaxQueueToRin)};
}

Outcome UnscheduledCollapse() {
  const double sp = RunVariant("grid", 12, Variant::kShortP).summary.drops_max_pct;
  const double sps = RunVariant("grid", 12, Variant::kShortPS).summary.drops_max_pct;
  return {sp > kMinUnscheduledDropPct && sps == 0.0,
          Fmt("ShortP max drops %.1f%% (need > %.0f%%), ShortP-S %.2f%%", sp,
              kMinUnscheduledDropPct, sps)};
}

Outcome CircleOptimum() {
  const Context& ctx = Ctx("circle", 12);
  const Network& net = ctx.net;
  const int c = KeptCap(net, 0, 1);
  const PlanResult plan = Plan(ctx, Variant::kMfIS, kSeed);
  const std::vector<int64_t> per_stream = SourceOutflow(net, plan.mf);
  const int64_t lo = *std::min_element(per_stream.begin(), per_stream.end());
  const bool lp_ok = lo >= kCircleShare * c / 2.0;

  // Hand-built table: ring edge i -> i+1 in slot i mod 2 on channel
  // (i / 2) mod 2, half the period each.
  const int n = net.num_nodes();
  const int T = net.radio().num_slots;
  std::vector<LinkId> edge(n, -1);
  for (NodeId i = 0; i < n; ++i) {
    for (LinkId e : net.out_links(i)) {
      const Link& l = net.link(e);
      if (l.v == (i + 1) % n && l.cap == c) edge[i] = e;
    }
  }
  ScheduleTable table(net.radio().num_freq, T);
  MfTable mf(net.num_links(), net.num_streams());
  for (NodeId i = 0; i < n; ++i) {
    for (int t = i % 2; t < T; t += 2) table.Add((i / 2) % 2, t, edge[i]);
  }
  for (const StreamRequest& r : net.streams()) {
    for (NodeId x = r.source; x != r.dest; x = (x + 1) % n) mf.at(edge[x], r.index) = c / 2;
  }
  const SupportReport rep = VerifySupport(net, ctx.graph, table, mf);
  bool sinr_ok = true;
  for (int t = 0; t < 2; ++t) {
    std::vector<Transmission> active;
    for (int j = 0; j < table.num_freq(); ++j) {
      for (LinkId e : table.cell(j, t)) active.push_back({e, j});
    }
    for (const Verdict& v : AdjudicateSlot(net, active)) sinr_ok = sinr_ok && v.ok();
  }
  std::string why = rep.ok ? "" : " (" + rep.violations.front().Describe(net) + ")";
  return {lp_ok && rep.ok && sinr_ok,
          Fmt("c=%d, LP %.1f and scheduled %lld packets per stream at the minimum (need "
              "%.0f); hand table support %s%s, SINR %s",
              c, plan.lp_rho * net.DemandPackets(0), static_cast<long long>(lo),
              kCircleShare * c / 2.0, rep.ok ? "ok" : "FAILS", why.c_str(),
              sinr_ok ? "ok" : "FAILS")};
}

Outcome LpOracle() {
  // a - m - b, 100 m apart.
  const Context line(testing::MakeScenario(LineXY(3, 100.0), {{0, 2}}, 100.0));
  const Network& net = line.net;
  const int F = net.radio().num_freq;
  const MultiFlow f = SolveLp(BuildLp(net, &line.graph, {}));
  const double lp = f.rho * net.DemandPackets(0);
  const int c = KeptCap(net, 0, 1);

  // Brute force: each hop picks one of its parallel links and a channel
  // split on a 0.1 lattice; bisect the largest feasible flow.
  std::vector<std::vector<double>> splits;
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; a + b <= 10; ++b) splits.push_back({a / 10.0, b / 10.0, (10 - a - b) / 10.0});
  }
  auto parallel = [&](NodeId u, NodeId v) {
    std::vector<LinkId> out;
    for (LinkId e : net.out_links(u)) {
      if (net.link(e).v == v) out.push_back(e);
    }
    return out;
  };
  double brute = 0.0;
  for (LinkId e1 : parallel(0, 1)) {
    for (LinkId e2 : parallel(1, 2)) {
      for (const auto& s1 : splits) {
        for (const auto& s2 : splits) {
          auto feasible = [&](double flow) {
            std::vector<std::vector<double>> x(F, std::vector<double>(net.num_links(), 0.0));
            for (int j = 0; j < F; ++j) {
              x[j][e1] = flow * s1[j] / net.link(e1).cap;
              x[j][e2] = flow * s2[j] / net.link(e2).cap;
            }
            return MaxRowLoad(net, line.graph, x) <= 1.0 + 1e-12;
          };
          double lo = brute, hi = 2.0 * c;
          if (!feasible(lo)) continue;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? lo : hi) = mid;
          }
          brute = std::max(brute, lo);
        }
      }
    }
  }
  const bool lp_ok = std::abs(lp - brute) <= kLpOracleTol * c &&
                     std::abs(lp - c / 2.0) <= kLpOracleTol * c;

  // Cycle removal on fuzzed flows.
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Network rnet(GenRandom(14, 1, 1.0, 5, 320.0));
  std::uniform_int_distribution<int> node(0, rnet.num_nodes() - 1);
  auto random_path = [&](NodeId a, NodeId b) {
    std::vector<bool> usable(rnet.num_links());
    for (auto&& u : usable) u = u01(rng) < 0.6;
    return ShortestLexPath(rnet, a, b, usable);
  };
  auto net_out = [&](const MultiFlow& m) {
    std::vector<double> out(rnet.num_nodes(), 0.0);
    for (const Link& l : rnet.links()) {
      out[l.u] += m.stream_flow(0, l.id);
      out[l.v] -= m.stream_flow(0, l.id);
    }
    return out;
  };
  int violations = 0, cycles_planted = 0;
  for (int t = 0; t < kCycleFuzzCases; ++t) {
    MultiFlow m(1, F, rnet.num_links());
    const NodeId a = rnet.streams()[0].source, b = rnet.streams()[0].dest;
    for (int p = 0; p < 4; ++p) {
      const double v = 1.0 + 10.0 * u01(rng);
      for (LinkId e : random_path(a, b)) m.at(0, p % F, e) += v;
    }
    for (int cyc = 0; cyc < 3; ++cyc) {
      const NodeId x = node(rng), y = node(rng);
      if (x == y) continue;
      const auto there = random_path(x, y), back = random_path(y, x);
      if (there.empty() || back.empty()) continue;
      const double v = 1.0 + 5.0 * u01(rng);
      for (LinkId e : there) m.at(0, cyc % F, e) += v;
      for (LinkId e : back) m.at(0, (cyc + 1) % F, e) += v;
      ++cycles_planted;
    }
    const MultiFlow before = m;
    RemoveCycles(rnet, m);
    std::vector<double> agg(rnet.num_links());
    for (LinkId e = 0; e < rnet.num_links(); ++e) {
      agg[e] = m.stream_flow(0, e);
      for (int j = 0; j < F; ++j) {
        if (m.at(0, j, e) > before.at(0, j, e) + 1e-9 || m.at(0, j, e) < -1e-9) ++violations;
      }
    }
    if (HasCycle(rnet, agg)) ++violations;
    const auto n0 = net_out(before), n1 = net_out(m);
    for (NodeId v = 0; v < rnet.num_nodes(); ++v) {
      if (std::abs(n0[v] - n1[v]) > 1e-6) ++violations;
    }
  }
  return {lp_ok && violations == 0,
          Fmt("LP %.6f vs brute force %.6f vs c/2 = %.1f packets; %d violations over %d "
              "fuzzed flows (%d planted cycles)",
              lp, brute, c / 2.0, violations, kCycleFuzzCases, cycles_planted)};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() / "vidmesh_acceptance_determinism";
  fs::remove_all(root);
  int files = 0, differing = 0;
  std::string first_diff;
  for (Variant v : {Variant::kMfIS, Variant::kShortP}) {
    BenchmarkSpec spec;
    spec.variant = v;
    spec.k = 8;
    spec.seed = kSeed;
    spec.duration_s = 10.0;
    const BenchRow a = RunBenchmark(spec, (root / "a").string());
    const BenchRow b = RunBenchmark(spec, (root / "b").string());
    if (!a.ok || !b.ok) return {false, "run failed: " + a.error + b.error};
  }
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const fs::path other = root / "b" / fs::relative(entry.path(), root / "a");
    ++files;
    if (!fs::exists(other) || Slurp(entry.path()) != Slurp(other)) {
      ++differing;
      if (first_diff.empty()) first_diff = fs::relative(entry.path(), root / "a").string();
    }
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0,
          Fmt("%d CSV files compared, %d differ%s%s", files, differing,
              first_diff.empty() ? "" : ", first: ", first_diff.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*check)();
};

const Criterion kCriteria[] = {
    {1, "SINR-feasible plans", SinrFeasibility},
    {2, "greedy schedules LP-feasible flows", GreedyGuarantee},
    {3, "path-peeling coverage", PeelCoverage},
    {4, "delay ordering", DelayOrdering},
    {5, "min-throughput ordering", MinThroughput},
    {6, "flow-control stability", FlowControlStability},
    {7, "unscheduled collapse", UnscheduledCollapse},
    {8, "circle optimum", CircleOptimum},
    {9, "small LP and cycle oracles", LpOracle},
    {10, "determinism", Determinism},
};

}  // namespace
}  // namespace vidmesh

int main(int argc, char** argv) {
  using vidmesh::kCriteria;
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    vidmesh::Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) {
      o.detail.pop_back();
    }
    std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
