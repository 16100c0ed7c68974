#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "vidmesh/error.h"
#include "vidmesh/harness.h"

using namespace vidmesh;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vidmesh_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string FirstLine(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("variant wiring") {
  struct Row {
    const char* name;
    Router router;
    bool interference;
    SchedulerMode scheduler;
    int radios;
  };
  const Row rows[] = {
      {"MF-I-S", Router::kLp, true, SchedulerMode::kPathPeel, 1},
      {"ShortP", Router::kShortp, false, SchedulerMode::kNone, 3},
      {"ShortP-S", Router::kShortp, false, SchedulerMode::kPathPeel, 1},
      {"MF-I", Router::kLp, true, SchedulerMode::kNone, 3},
      {"MF", Router::kLp, false, SchedulerMode::kNone, 3},
      {"MF-S", Router::kLp, false, SchedulerMode::kGreedyAugment, 1},
  };
  CHECK(AllVariants().size() == 6);
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const Variant v = ParseVariant(r.name);
    CHECK(std::string(VariantName(v)) == r.name);
    const Wiring w = WiringOf(v);
    CHECK(w.router == r.router);
    CHECK(w.interference == r.interference);
    CHECK(w.scheduler == r.scheduler);
    CHECK(w.radios == r.radios);
  }
  CHECK(ParseVariant("mf-i-s") == Variant::kMfIS);
  CHECK_THROWS_AS(ParseVariant("MF-X"), InputError);
}

TEST_CASE("derived seeds are stable and spread") {
  CHECK(DeriveSeed(1, 2) == DeriveSeed(1, 2));
  std::set<uint64_t> seen;
  for (uint64_t root = 0; root < 20; ++root) {
    for (uint64_t tag = 0; tag < 5; ++tag) seen.insert(DeriveSeed(root, tag));
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("every variant plans a supported table on a small network") {
  const Context ctx(GenRandom(16, 4, 4.0, 12, 420.0));
  for (Variant v : AllVariants()) {
    CAPTURE(VariantName(v));
    const PlanResult p = Plan(ctx, v, 3);
    CHECK(p.wiring == WiringOf(v));
    CHECK(p.has_lp == (WiringOf(v).router == Router::kLp));
    if (p.scheduled) {
      CHECK(p.support.ok);
      CHECK(p.scheduled_flow >= 0);
    } else {
      CHECK_FALSE(p.routes.empty());
    }
    if (v == Variant::kMfS) CHECK(p.augment.period >= ctx.net.radio().num_slots);
  }
  Wiring greedy = WiringOf(Variant::kMfIS);
  greedy.scheduler = SchedulerMode::kGreedy;
  const PlanResult g = PlanWith(ctx, greedy, 3);
  CHECK(g.table.num_slots() == ctx.net.radio().num_slots);
  CHECK(g.support.ok);
  Wiring bad = WiringOf(Variant::kShortPS);
  bad.scheduler = SchedulerMode::kGreedy;
  CHECK_THROWS_AS(PlanWith(ctx, bad, 3), InputError);
}

TEST_CASE("benchmark run writes its artefacts") {
  const fs::path dir = TempDir("bench");
  const fs::path scen = dir / "small.json";
  std::ofstream(scen) << SerializeScenario(GenRandom(14, 3, 2.0, 7, 380.0));
  BenchmarkSpec spec;
  spec.scenario = scen.string();
  spec.k = 3;
  spec.duration_s = 4.0;
  const BenchRow row = RunBenchmark(spec, dir.string());
  REQUIRE_MESSAGE(row.ok, row.error);
  CHECK(row.support_ok);
  CHECK(row.lp_rho > 0.0);
  const fs::path run = dir / "small_k3_MF-I-S";
  for (const char* f : {"scenario.json", "flow.csv", "table.csv", "mf.csv", "streams.csv",
                        "queues.csv", "links.csv", "stream_summary.csv", "summary.txt"}) {
    CHECK_MESSAGE(fs::exists(run / f), f);
  }
  CHECK(FirstLine(run / "table.csv") == "freq,slot,link,u,v,mcs");
  CHECK(FirstLine(run / "mf.csv") == "link,stream,packets");
  CHECK(FirstLine(run / "streams.csv") ==
        "window,stream,mbps,generated,delivered,dropped,delay_avg_s,delay_max_s");
  CHECK(FirstLine(run / "queues.csv") == "period,node,stream,r_in,drops,queue_before,queue_after");
  CHECK(FirstLine(run / "links.csv") == "link,u,v,mcs,attempted,delivered,per");
  CHECK(FirstLine(run / "stream_summary.csv") ==
        "stream,throughput_mbps,delay_max_s,delay_avg_s,hops_avg,drop_pct");

  std::ostringstream table, csv;
  WriteSummaryTable(table, {row});
  WriteSummaryCsv(csv, {row});
  CHECK(table.str().find("MF-I-S") != std::string::npos);
  const std::string csv_text = csv.str();
  CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 2);
  fs::remove_all(dir);
}

TEST_CASE("a failing stage leaves error.txt") {
  const fs::path dir = TempDir("fail");
  BenchmarkSpec spec;
  spec.scenario = (dir / "missing.json").string();
  const BenchRow row = RunBenchmark(spec, dir.string());
  CHECK_FALSE(row.ok);
  CHECK(row.error.rfind("scenario:", 0) == 0);
  CHECK(fs::exists(dir / "missing_k12_MF-I-S" / "error.txt"));
  std::ostringstream table;
  WriteSummaryTable(table, {row});
  CHECK(table.str().find("failed") != std::string::npos);
  fs::remove_all(dir);
}
