// vidmesh: plan, simulate and benchmark video streams over a static mesh.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vidmesh/csv.h"
#include "vidmesh/error.h"
#include "vidmesh/harness.h"

namespace fs = std::filesystem;
using namespace vidmesh;

namespace {

struct ScenarioArgs {
  std::string scenario = "grid";
  int k = 12;
  double demand = 10.0;
  uint64_t seed = 1;
  std::string freq_sum = "all_other";
  double lambda = 1.0 / 20.0;
};

void AddLpArgs(CLI::App* cmd, std::string& value, double& lambda) {
  cmd->add_option("--lambda", lambda, "weight of the total-throughput term in the LP objective")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--conflict-freq-sum", value,
                  "other-channel terms in the LP conflict rows: all_other or lower")
      ->check(CLI::IsMember({"all_other", "lower"}))
      ->capture_default_str();
}

PlanOptions PlanOptionsFor(const std::string& freq_sum, double lambda) {
  PlanOptions o;
  o.lp.lambda = lambda;
  o.lp.freq_sum = freq_sum == "lower" ? ConflictFreqSum::kLower : ConflictFreqSum::kAllOther;
  return o;
}

void AddScenarioArgs(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("-s,--scenario", a.scenario, "grid, circle, random or a scenario JSON file")
      ->capture_default_str();
  cmd->add_option("-k,--streams", a.k, "number of stream requests")->capture_default_str();
  cmd->add_option("-d,--demand", a.demand, "demand per stream, Mbps")->capture_default_str();
  cmd->add_option("--seed", a.seed, "root seed")->capture_default_str();
  AddLpArgs(cmd, a.freq_sum, a.lambda);
}

// VIDMESH_OUT_DIR overrides the default output directory.
std::string DefaultOutDir() {
  const char* env = std::getenv("VIDMESH_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "vidmesh-out";
}

BenchmarkSpec SpecFrom(const ScenarioArgs& a, const std::string& variant) {
  BenchmarkSpec spec;
  spec.scenario = a.scenario;
  spec.k = a.k;
  spec.demand_mbps = a.demand;
  spec.seed = a.seed;
  spec.variant = ParseVariant(variant);
  spec.plan = PlanOptionsFor(a.freq_sum, a.lambda);
  return spec;
}

template <typename Fn>
void WriteFile(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  fn(out);
}

int CmdPlan(const ScenarioArgs& a, const std::string& variant, const std::string& out_dir,
            bool dump_lp) {
  const BenchmarkSpec spec = SpecFrom(a, variant);
  const Context ctx(MakeScenario(spec));
  const PlanResult plan = Plan(ctx, spec.variant, spec.seed, spec.plan);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  WriteFile(dir / "scenario.json", [&](std::ostream& o) { o << SerializeScenario(ctx.scenario); });
  WriteFile(dir / "interference.csv",
            [&](std::ostream& o) { WriteInterferenceCsv(o, ctx.net, ctx.index); });
  WriteFile(dir / "mf.csv", [&](std::ostream& o) { WriteMfCsv(o, plan.mf); });
  if (plan.scheduled) {
    WriteFile(dir / "table.csv", [&](std::ostream& o) { WriteTableCsv(o, ctx.net, plan.table); });
  }
  if (plan.has_lp) {
    WriteFile(dir / "flow.csv", [&](std::ostream& o) { WriteFlowCsv(o, ctx.net, plan.flow); });
  }
  if (dump_lp && plan.has_lp) {
    LpOptions lpo = spec.plan.lp;
    lpo.with_interference = plan.wiring.interference;
    const LpInstance inst = BuildLp(ctx.net, lpo.with_interference ? &ctx.graph : nullptr, lpo);
    WriteFile(dir / "model.lp", [&](std::ostream& o) { inst.problem.WriteLp(o); });
  }
  if (!plan.routes.empty()) {
    WriteFile(dir / "routes.csv", [&](std::ostream& o) {
      o << "stream,freq,weight,nodes\n";
      for (const Route& r : plan.routes) {
        std::ostringstream nodes;
        for (NodeId v : PathNodes(ctx.net, r.links)) nodes << (nodes.tellp() > 0 ? " " : "") << v;
        CsvRow(o, r.stream, r.freq, Num(r.weight), nodes.str());
      }
    });
  }

  std::cout << "scenario " << ctx.scenario.name << ": " << ctx.net.num_nodes() << " nodes, "
            << ctx.net.num_links() << " links, " << ctx.net.num_streams() << " streams\n";
  std::cout << "variant " << VariantName(spec.variant) << '\n';
  if (plan.has_lp) {
    std::cout << "lp rho " << plan.lp_rho << ", flow " << plan.lp_flow
              << " packets/period, solved in " << plan.lp_seconds << " s\n";
  }
  if (plan.scheduled) {
    std::cout << "table " << plan.table.num_freq() << " x " << plan.table.num_slots() << ", "
              << plan.table.Placements() << " placements, scheduled " << plan.scheduled_flow
              << " packets/period";
    if (plan.has_lp && plan.lp_flow > 0) {
      std::cout << " (" << std::fixed << std::setprecision(1)
                << 100.0 * plan.scheduled_flow / plan.lp_flow << "% of LP)" << std::defaultfloat;
    }
    std::cout << '\n';
    if (plan.deficit_slots > 0) {
      std::cout << "greedy deficit " << plan.deficit_slots << " slots, period stretched to "
                << plan.augment.period << " (dilution " << plan.augment.dilution << ")\n";
    }
    std::cout << "support " << (plan.support.ok ? "ok" : "FAILED") << '\n';
    for (const auto& v : plan.support.violations) std::cout << "  " << v.Describe(ctx.net) << '\n';
  }
  std::cout << "wrote " << dir.string() << '\n';
  return plan.support.ok ? 0 : 2;
}

SimConfig MakeSimConfig(double duration, uint64_t seed, double per, bool stochastic,
                        bool no_fc) {
  SimConfig cfg;
  cfg.duration_s = duration;
  cfg.seed = seed;
  cfg.per = per;
  cfg.adjudication = stochastic ? Adjudication::kStochastic : Adjudication::kDeterministic;
  cfg.flow_control = !no_fc;
  return cfg;
}

void WriteMetrics(const fs::path& dir, const Network& net, const SimMetrics& m) {
  fs::create_directories(dir);
  const Summary s = Summarize(m, net.radio());
  WriteFile(dir / "streams.csv", [&](std::ostream& o) { WriteStreamSeriesCsv(o, m, net.radio()); });
  WriteFile(dir / "queues.csv", [&](std::ostream& o) { WriteQueueCsv(o, m); });
  WriteFile(dir / "links.csv", [&](std::ostream& o) { WriteLinkCsv(o, net, m); });
  WriteFile(dir / "stream_summary.csv", [&](std::ostream& o) { WriteStreamSummaryCsv(o, s); });
  std::cout << std::fixed << std::setprecision(3) << "throughput min " << s.thr_min_mbps
            << " sum " << s.thr_sum_mbps << " max " << s.thr_max_mbps << " Mbps\n"
            << "delay max " << s.delay_max_s << " s, per hop " << s.delay_per_hop_s
            << " s, hops " << s.hops_avg << '\n'
            << "drops max " << s.drops_max_pct << "%, PER " << s.per_avg
            << ", SINR failures " << s.sinr_failures << std::defaultfloat << '\n';
}

int CmdSimulate(const ScenarioArgs& a, const std::string& variant, const std::string& plan_dir,
                const std::string& out_dir, double duration, double per, bool stochastic,
                bool no_fc) {
  const fs::path out(out_dir);
  if (!plan_dir.empty()) {
    const fs::path dir(plan_dir);
    const Scenario sc = LoadScenario((dir / "scenario.json").string());
    const Network net(sc);
    std::ifstream tin(dir / "table.csv"), mfin(dir / "mf.csv");
    if (!tin || !mfin) throw InputError("plan directory needs table.csv and mf.csv");
    const ScheduleTable table = ReadTableCsv(tin, net, net.radio().num_slots);
    const MfTable mf = ReadMfCsv(mfin, net);
    SimConfig cfg = MakeSimConfig(duration, DeriveSeed(a.seed, 2), per, stochastic, no_fc);
    const double period_s = table.num_slots() * net.radio().slot_duration_s;
    cfg.duration_s = std::max(1.0, std::round(duration / period_s)) * period_s;
    WriteMetrics(out, net, RunScheduled(net, table, mf, cfg));
    return 0;
  }
  const BenchmarkSpec spec = SpecFrom(a, variant);
  const Context ctx(MakeScenario(spec));
  const PlanResult plan = Plan(ctx, spec.variant, spec.seed, spec.plan);
  SimConfig cfg = MakeSimConfig(duration, DeriveSeed(a.seed, 2), per, stochastic, no_fc);
  const int period = plan.scheduled ? plan.table.num_slots() : ctx.net.radio().num_slots;
  const double period_s = period * ctx.net.radio().slot_duration_s;
  cfg.duration_s = std::max(1.0, std::round(duration / period_s)) * period_s;
  WriteMetrics(out, ctx.net, Simulate(ctx, plan, cfg));
  return 0;
}

int CmdBench(const std::string& scenario, const std::vector<int>& ks,
             const std::vector<std::string>& variants, double demand, uint64_t seed,
             double duration, const PlanOptions& plan_options, const std::string& out_dir) {
  std::vector<BenchRow> rows;
  for (int k : ks) {
    BenchmarkSpec base;
    base.scenario = scenario;
    base.k = k;
    base.demand_mbps = demand;
    base.seed = seed;
    base.duration_s = duration;
    base.plan = plan_options;
    const Context ctx(MakeScenario(base));
    for (const std::string& name : variants) {
      BenchmarkSpec spec = base;
      spec.variant = ParseVariant(name);
      std::cerr << "running " << VariantName(spec.variant) << " " << scenario << " k=" << k
                << "\n";
      rows.push_back(RunBenchmark(spec, out_dir, &ctx));
    }
  }
  WriteSummaryTable(std::cout, rows);
  fs::create_directories(out_dir);
  WriteFile(fs::path(out_dir) / "summary.csv", [&](std::ostream& o) { WriteSummaryCsv(o, rows); });
  bool ok = true;
  for (const BenchRow& r : rows) ok = ok && r.ok;
  return ok ? 0 : 1;
}

int CmdCalibrate(double range, double target_mbps, double chord) {
  RadioConfig cfg = RadioConfig::Defaults();
  const McsTable mcs = McsTable::Default();
  cfg.ref_gain = CalibrateRefGain(cfg, mcs.beta0(), range);
  std::cout << std::setprecision(6) << "ref_gain " << cfg.ref_gain << " (MCS-0 range "
            << range << " m)\n";
  std::cout << "mcs  rate_mbps  beta_db  range_m  pps\n";
  for (const McsEntry& m : mcs.entries()) {
    std::cout << std::setw(3) << m.index << std::setw(11) << m.rate_mbps << std::setw(9)
              << LinearToDb(m.beta) << std::setw(9) << std::fixed << std::setprecision(1)
              << RangeForThreshold(cfg, m.beta) << std::setw(5)
              << PacketsPerSlot(m.rate_mbps, cfg) << std::defaultfloat << std::setprecision(6)
              << '\n';
  }
  // One interferer 250 m from the receiver of a max-range MCS-0 link.
  const std::vector<Node> nodes = {{0, 0.0, 0.0}, {1, range, 0.0}, {2, range + 250.0, 0.0}};
  const std::vector<NodeId> none, one = {2};
  const double drop_db = LinearToDb(Sinr(nodes, 0, 1, none, cfg)) -
                         LinearToDb(Sinr(nodes, 0, 1, one, cfg));
  std::cout << "interferer at 250 m lowers SINR by " << drop_db << " dB\n";

  // mac_efficiency that brings the best MCS at the chord to the target rate.
  const std::vector<Node> pair = {{0, 0.0, 0.0}, {1, chord, 0.0}};
  const double snr = Sinr(pair, 0, 1, none, cfg);
  double best = 0.0;
  for (const McsEntry& m : mcs.entries()) {
    if (snr >= m.beta) best = m.rate_mbps;
  }
  if (best > 0.0) {
    std::cout << "chord " << chord << " m: best rate " << best << " Mbps, mac_efficiency "
              << std::min(1.0, target_mbps / best) << " for " << target_mbps << " Mbps\n";
  } else {
    std::cout << "chord " << chord << " m is out of range\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vidmesh: plan, schedule and simulate video streams over a wireless mesh"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);

  ScenarioArgs plan_args, sim_args;
  std::string plan_variant = "MF-I-S", plan_out = DefaultOutDir();
  bool dump_lp = false;
  auto* plan = app.add_subcommand("plan", "route, assign channels and schedule");
  AddScenarioArgs(plan, plan_args);
  plan->add_option("-v,--variant", plan_variant, "MF-I-S, ShortP-S, MF-S, ShortP, MF-I or MF")
      ->capture_default_str();
  plan->add_option("-o,--out", plan_out, "output directory")->capture_default_str();
  plan->add_flag("--lp", dump_lp, "also write the LP in LP text format");

  std::string sim_variant = "MF-I-S", sim_out = DefaultOutDir(), sim_plan;
  double duration = 25.0, per = 0.0;
  bool stochastic = false, no_fc = false;
  auto* sim = app.add_subcommand("simulate", "run a plan through the slot simulator");
  AddScenarioArgs(sim, sim_args);
  sim->add_option("-v,--variant", sim_variant, "variant to plan when no --plan is given")
      ->capture_default_str();
  sim->add_option("--plan", sim_plan, "directory written by `plan` (scheduled variants)");
  sim->add_option("-o,--out", sim_out, "output directory")->capture_default_str();
  sim->add_option("--duration", duration, "seconds")->capture_default_str();
  sim->add_option("--per", per, "extra packet error rate, stochastic mode")
      ->check(CLI::Range(0.0, 0.1));
  sim->add_flag("--stochastic", stochastic, "apply --per to surviving packets");
  sim->add_flag("--no-flow-control", no_fc, "send at the planned rates without feedback");

  std::string bench_scenario = "grid", bench_out = DefaultOutDir();
  std::vector<int> bench_k = {8, 12, 16};
  std::vector<std::string> bench_variants;
  for (Variant v : AllVariants()) bench_variants.push_back(VariantName(v));
  double bench_demand = 10.0, bench_duration = 25.0;
  uint64_t bench_seed = 1;
  std::string bench_freq_sum = "all_other";
  double bench_lambda = 1.0 / 20.0;
  auto* bench = app.add_subcommand("bench", "run the variant matrix");
  bench->add_option("-s,--scenario", bench_scenario, "grid, circle, random or a JSON file")
      ->capture_default_str();
  bench->add_option("-k,--streams", bench_k, "stream counts")->capture_default_str();
  bench->add_option("-v,--variants", bench_variants, "variants")->capture_default_str();
  bench->add_option("-d,--demand", bench_demand, "demand per stream, Mbps")->capture_default_str();
  bench->add_option("--seed", bench_seed, "root seed")->capture_default_str();
  bench->add_option("--duration", bench_duration, "seconds")->capture_default_str();
  AddLpArgs(bench, bench_freq_sum, bench_lambda);
  bench->add_option("-o,--out", bench_out, "output directory")->capture_default_str();

  double cal_range = kDefaultMcs0RangeM, cal_target = 8.2,
         cal_chord = 2.0 * 500.0 * std::sin(M_PI / 24.0);
  auto* cal = app.add_subcommand("calibrate", "fit ref_gain and report ranges and rates");
  cal->add_option("--range", cal_range, "MCS-0 range, m")->capture_default_str();
  cal->add_option("--target-mbps", cal_target, "rate wanted at the chord")->capture_default_str();
  cal->add_option("--chord", cal_chord, "link length for the mac_efficiency fit, m")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*plan) return CmdPlan(plan_args, plan_variant, plan_out, dump_lp);
    if (*sim) {
      return CmdSimulate(sim_args, sim_variant, sim_plan, sim_out, duration, per, stochastic,
                         no_fc);
    }
    if (*bench) {
      return CmdBench(bench_scenario, bench_k, bench_variants, bench_demand, bench_seed,
                      bench_duration,
                      PlanOptionsFor(bench_freq_sum, bench_lambda), bench_out);
    }
    if (*cal) return CmdCalibrate(cal_range, cal_target, cal_chord);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
