#include "vidmesh/harness.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vidmesh/csv.h"
#include "vidmesh/error.h"

namespace vidmesh {

namespace {

struct VariantInfo {
  Variant variant;
  const char* name;
  Wiring wiring;
};

const VariantInfo kVariants[] = {
    {Variant::kMfIS, "MF-I-S",
     {Router::kLp, true, SchedulerMode::kPathPeel, 1, ChannelPolicy::kRoundRobin}},
    {Variant::kShortP, "ShortP",
     {Router::kShortp, false, SchedulerMode::kNone, 3, ChannelPolicy::kRoundRobin}},
    {Variant::kShortPS, "ShortP-S",
     {Router::kShortp, false, SchedulerMode::kPathPeel, 1, ChannelPolicy::kRandom}},
    {Variant::kMfI, "MF-I",
     {Router::kLp, true, SchedulerMode::kNone, 3, ChannelPolicy::kRoundRobin}},
    {Variant::kMf, "MF",
     {Router::kLp, false, SchedulerMode::kNone, 3, ChannelPolicy::kRoundRobin}},
    {Variant::kMfS, "MF-S",
     {Router::kLp, false, SchedulerMode::kGreedyAugment, 1, ChannelPolicy::kRoundRobin}},
};

const VariantInfo& Info(Variant v) {
  for (const auto& info : kVariants) {
    if (info.variant == v) return info;
  }
  throw InputError("unknown variant");
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

enum SeedTag : uint64_t { kChannelSeed = 1, kSimSeed = 2 };

// End-to-end packets per period: net mf leaving each stream's source.
int64_t SourceOutflow(const Network& net, const MfTable& mf) {
  int64_t total = 0;
  for (const StreamRequest& s : net.streams()) {
    for (LinkId e : net.out_links(s.source)) total += mf.at(e, s.index);
    for (LinkId e : net.in_links(s.source)) total -= mf.at(e, s.index);
  }
  return total;
}

}  // namespace

const char* VariantName(Variant v) { return Info(v).name; }

Variant ParseVariant(const std::string& name) {
  for (const auto& info : kVariants) {
    if (Lower(info.name) == Lower(name)) return info.variant;
  }
  throw InputError("unknown variant '" + name + "'");
}

std::vector<Variant> AllVariants() {
  std::vector<Variant> out;
  for (const auto& info : kVariants) out.push_back(info.variant);
  return out;
}

Wiring WiringOf(Variant v) { return Info(v).wiring; }

uint64_t DeriveSeed(uint64_t root, uint64_t tag) {
  // splitmix64 finalizer over root and tag
  uint64_t z = root + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Context::Context(Scenario sc)
    : scenario(std::move(sc)),
      net(scenario),
      index(BuildInterferenceIndex(net)),
      graph(net, index) {}

PlanResult PlanWith(const Context& ctx, const Wiring& wiring, uint64_t seed,
                    const PlanOptions& options) {
  const Network& net = ctx.net;
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult plan;
  plan.wiring = wiring;
  plan.mf = MfTable(net.num_links(), net.num_streams());

  MfTable rounded;
  if (wiring.router == Router::kLp) {
    LpOptions lpo = options.lp;
    lpo.with_interference = wiring.interference;
    const auto lp_t0 = std::chrono::steady_clock::now();
    const LpInstance inst = BuildLp(net, wiring.interference ? &ctx.graph : nullptr, lpo);
    plan.flow = SolveLp(inst, options.solver);
    plan.lp_seconds = Seconds(lp_t0);
    plan.has_lp = true;
    plan.lp_rho = plan.flow.rho;
    for (int i = 0; i < net.num_streams(); ++i) {
      if (inst.active[i]) plan.lp_flow += plan.flow.rho_i[i] * inst.demand[i];
    }
    RemoveCycles(net, plan.flow);
    rounded = RoundToMf(net, plan.flow);
    plan.paths = DecomposePaths(net, rounded);
  } else {
    plan.routes = ShortpRoute(net, wiring.channels, DeriveSeed(seed, kChannelSeed));
    plan.paths = RoutesToPaths(net, plan.routes);
    rounded = RoutesToMf(net, plan.routes);
  }

  switch (wiring.scheduler) {
    case SchedulerMode::kNone:
      if (wiring.router == Router::kLp) {
        plan.routes = PathsToRoutes(net, plan.paths,
                                    wiring.interference ? &plan.flow : nullptr);
      }
      plan.mf = RoutesToMf(net, plan.routes);
      break;
    case SchedulerMode::kPathPeel: {
      PeelOptions po;
      if (wiring.router == Router::kShortp) {
        po.freq_choice = FreqChoice::kFixed;
        po.stream_freq.assign(net.num_streams(), 0);
        for (const Route& r : plan.routes) po.stream_freq[r.stream] = r.freq;
      }
      PeelResult peel = PathPeelSchedule(net, ctx.graph, plan.paths, po);
      plan.table = std::move(peel.table);
      plan.mf = std::move(peel.mf);
      for (int64_t v : peel.scheduled) plan.scheduled_flow += v;
      plan.scheduled = true;
      break;
    }
    case SchedulerMode::kGreedy:
    case SchedulerMode::kGreedyAugment: {
      if (!plan.has_lp) throw InputError("the greedy scheduler needs LP flows");
      GreedyResult gr = GreedySchedule(net, ctx.graph, plan.flow, rounded);
      plan.deficit_slots = gr.deficit_slots();
      if (wiring.scheduler == SchedulerMode::kGreedyAugment) {
        plan.augment = AugmentSchedule(net, ctx.graph, rounded, gr);
      } else {
        plan.augment.period = gr.table.num_slots();
      }
      plan.table = std::move(gr.table);
      plan.mf = std::move(gr.mf);
      plan.scheduled_flow = SourceOutflow(net, plan.mf);
      plan.scheduled = true;
      break;
    }
  }
  if (plan.scheduled) plan.support = VerifySupport(net, ctx.graph, plan.table, plan.mf);
  plan.plan_seconds = Seconds(t0);
  return plan;
}

PlanResult Plan(const Context& ctx, Variant variant, uint64_t seed,
                const PlanOptions& options) {
  return PlanWith(ctx, WiringOf(variant), seed, options);
}

SimMetrics Simulate(const Context& ctx, const PlanResult& plan, SimConfig config) {
  config.radios_per_node = plan.wiring.radios;
  if (plan.scheduled) return RunScheduled(ctx.net, plan.table, plan.mf, config);
  return RunUnscheduled(ctx.net, ctx.graph, plan.routes, config);
}

Scenario MakeScenario(const BenchmarkSpec& spec) {
  if (spec.scenario == "grid") return GenGrid(spec.k, spec.demand_mbps, spec.seed);
  if (spec.scenario == "circle") return GenCircle(spec.k, spec.demand_mbps);
  if (spec.scenario == "random") return GenRandom(49, spec.k, spec.demand_mbps, spec.seed);
  return LoadScenario(spec.scenario);
}

namespace {

std::string RunDirName(const BenchmarkSpec& spec) {
  std::string base = spec.scenario;
  if (base != "grid" && base != "circle" && base != "random") {
    base = std::filesystem::path(base).stem().string();
  }
  std::ostringstream os;
  os << base << "_k" << spec.k << '_' << VariantName(spec.variant);
  return os.str();
}

template <typename Fn>
void Dump(const std::filesystem::path& dir, const char* name, Fn&& fn) {
  std::ofstream out(dir / name);
  if (!out) throw InputError("cannot write " + (dir / name).string());
  fn(out);
}

}  // namespace

BenchRow RunBenchmark(const BenchmarkSpec& spec, const std::string& out_dir,
                      const Context* shared) {
  BenchRow row;
  row.spec = spec;
  std::filesystem::path dir;
  if (!out_dir.empty()) {
    dir = std::filesystem::path(out_dir) / RunDirName(spec);
    std::filesystem::create_directories(dir);
  }
  std::string stage = "scenario";
  try {
    std::unique_ptr<Context> own;
    if (shared == nullptr) own = std::make_unique<Context>(MakeScenario(spec));
    const Context& ctx = shared ? *shared : *own;
    if (!dir.empty()) {
      Dump(dir, "scenario.json", [&](std::ostream& o) { o << SerializeScenario(ctx.scenario); });
    }

    stage = "plan";
    const PlanResult plan = Plan(ctx, spec.variant, spec.seed, spec.plan);
    row.lp_rho = plan.lp_rho;
    row.support_ok = !plan.scheduled || plan.support.ok;
    row.period_slots = plan.scheduled ? plan.table.num_slots() : ctx.net.radio().num_slots;
    if (plan.has_lp && plan.lp_flow > 0 && plan.scheduled) {
      row.scheduled_fraction = static_cast<double>(plan.scheduled_flow) / plan.lp_flow;
    }
    if (!dir.empty()) {
      if (plan.has_lp) {
        Dump(dir, "flow.csv", [&](std::ostream& o) { WriteFlowCsv(o, ctx.net, plan.flow); });
      }
      if (plan.scheduled) {
        Dump(dir, "table.csv",
             [&](std::ostream& o) { WriteTableCsv(o, ctx.net, plan.table); });
      }
      Dump(dir, "mf.csv", [&](std::ostream& o) { WriteMfCsv(o, plan.mf); });
    }
    if (plan.scheduled && !plan.support.ok) {
      throw ConsistencyError("plan fails support verification: " +
                             plan.support.violations.front().Describe(ctx.net));
    }

    stage = "simulate";
    SimConfig cfg;
    cfg.duration_s = spec.duration_s;
    cfg.seed = DeriveSeed(spec.seed, kSimSeed);
    // A stretched table must still fit a whole number of periods.
    const double period_s = row.period_slots * ctx.net.radio().slot_duration_s;
    cfg.duration_s = std::max(1.0, std::round(spec.duration_s / period_s)) * period_s;
    const SimMetrics m = Simulate(ctx, plan, cfg);
    row.summary = Summarize(m, ctx.net.radio());
    if (!dir.empty()) {
      const RadioConfig& radio = ctx.net.radio();
      Dump(dir, "streams.csv", [&](std::ostream& o) { WriteStreamSeriesCsv(o, m, radio); });
      Dump(dir, "queues.csv", [&](std::ostream& o) { WriteQueueCsv(o, m); });
      Dump(dir, "links.csv", [&](std::ostream& o) { WriteLinkCsv(o, ctx.net, m); });
      Dump(dir, "stream_summary.csv",
           [&](std::ostream& o) { WriteStreamSummaryCsv(o, row.summary); });
      Dump(dir, "summary.txt", [&](std::ostream& o) { WriteSummaryTable(o, {row}); });
    }
  } catch (const std::exception& ex) {
    row.ok = false;
    row.error = stage + ": " + ex.what();
    if (!dir.empty()) {
      std::ofstream err(dir / "error.txt");
      err << row.error << '\n';
      if (const auto* lp = dynamic_cast<const LpSolveError*>(&ex)) {
        std::ofstream(dir / "failed.lp") << lp->lp_text();
      }
    }
  }
  return row;
}

void WriteSummaryTable(std::ostream& out, const std::vector<BenchRow>& rows) {
  auto flags = out.flags();
  out << std::left << std::setw(10) << "variant" << std::setw(8) << "scen" << std::setw(4)
      << "k" << std::right << std::setw(9) << "thr_min" << std::setw(9) << "thr_sum"
      << std::setw(9) << "thr_max" << std::setw(10) << "delay_max" << std::setw(10)
      << "delay/hop" << std::setw(7) << "hops" << std::setw(9) << "drops%" << std::setw(8)
      << "PER" << '\n';
  for (const BenchRow& r : rows) {
    out << std::left << std::setw(10) << VariantName(r.spec.variant) << std::setw(8)
        << r.spec.scenario.substr(0, 7) << std::setw(4) << r.spec.k << std::right;
    if (!r.ok) {
      out << "  failed: " << r.error << '\n';
      continue;
    }
    const Summary& s = r.summary;
    out << std::fixed << std::setprecision(3) << std::setw(9) << s.thr_min_mbps
        << std::setw(9) << s.thr_sum_mbps << std::setw(9) << s.thr_max_mbps
        << std::setw(10) << s.delay_max_s << std::setw(10) << s.delay_per_hop_s
        << std::setprecision(2) << std::setw(7) << s.hops_avg << std::setw(9)
        << s.drops_max_pct << std::setprecision(4) << std::setw(8) << s.per_avg << '\n';
  }
  out.flags(flags);
}

void WriteSummaryCsv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "variant,scenario,k,seed,ok,thr_min_mbps,thr_sum_mbps,thr_max_mbps,"
         "delay_max_s,delay_per_hop_s,hops_avg,drops_max_pct,per_avg,sinr_failures,"
         "lp_rho,scheduled_fraction,period_slots\n";
  for (const BenchRow& r : rows) {
    const Summary& s = r.summary;
    CsvRow(out, VariantName(r.spec.variant), r.spec.scenario, r.spec.k, r.spec.seed,
           r.ok ? 1 : 0, Num(s.thr_min_mbps), Num(s.thr_sum_mbps), Num(s.thr_max_mbps),
           Num(s.delay_max_s), Num(s.delay_per_hop_s), Num(s.hops_avg),
           Num(s.drops_max_pct), Num(s.per_avg), s.sinr_failures, Num(r.lp_rho),
           Num(r.scheduled_fraction), r.period_slots);
  }
}

}  // namespace vidmesh
