#include <benchmark/benchmark.h>

#include "vidmesh/flow.h"
#include "vidmesh/harness.h"
#include "vidmesh/schedule.h"
#include "vidmesh/simulator.h"

using namespace vidmesh;

namespace {

const Context& Grid(int k) {
  static std::vector<std::unique_ptr<Context>> cache(33);
  if (!cache[k]) cache[k] = std::make_unique<Context>(GenGrid(k, 10.0, 1));
  return *cache[k];
}

MultiFlow LpFlow(const Context& ctx) {
  MultiFlow f = SolveLp(BuildLp(ctx.net, &ctx.graph, {}));
  RemoveCycles(ctx.net, f);
  return f;
}

void BM_BuildInterference(benchmark::State& state) {
  const Context& ctx = Grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    InterferenceIndex index = BuildInterferenceIndex(ctx.net);
    benchmark::DoNotOptimize(index);
  }
}
BENCHMARK(BM_BuildInterference)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveLp(benchmark::State& state) {
  const Context& ctx = Grid(static_cast<int>(state.range(0)));
  const LpInstance inst = BuildLp(ctx.net, &ctx.graph, {});
  for (auto _ : state) {
    MultiFlow f = SolveLp(inst);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_SolveLp)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PathPeel(benchmark::State& state) {
  const Context& ctx = Grid(static_cast<int>(state.range(0)));
  const FlowPathSet paths = DecomposePaths(ctx.net, RoundToMf(ctx.net, LpFlow(ctx)));
  for (auto _ : state) {
    PeelResult r = PathPeelSchedule(ctx.net, ctx.graph, paths);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_PathPeel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Greedy(benchmark::State& state) {
  const Context& ctx = Grid(static_cast<int>(state.range(0)));
  const MultiFlow flow = LpFlow(ctx);
  const MfTable target = RoundToMf(ctx.net, flow);
  for (auto _ : state) {
    GreedyResult r = GreedySchedule(ctx.net, ctx.graph, flow, target);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Greedy)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

// Simulated seconds per wall second is the useful figure here.
void BM_SimulateScheduled(benchmark::State& state) {
  const Context& ctx = Grid(12);
  const PlanResult plan = Plan(ctx, Variant::kMfIS, 1);
  SimConfig cfg;
  cfg.duration_s = static_cast<double>(state.range(0));
  for (auto _ : state) {
    SimMetrics m = RunScheduled(ctx.net, plan.table, plan.mf, cfg);
    benchmark::DoNotOptimize(m);
  }
  state.counters["sim_s"] =
      benchmark::Counter(cfg.duration_s, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_SimulateScheduled)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SimulateUnscheduled(benchmark::State& state) {
  const Context& ctx = Grid(12);
  const PlanResult plan = Plan(ctx, Variant::kShortP, 1);
  SimConfig cfg;
  cfg.duration_s = static_cast<double>(state.range(0));
  cfg.radios_per_node = ctx.net.radio().num_freq;
  for (auto _ : state) {
    SimMetrics m = RunUnscheduled(ctx.net, ctx.graph, plan.routes, cfg);
    benchmark::DoNotOptimize(m);
  }
  state.counters["sim_s"] =
      benchmark::Counter(cfg.duration_s, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_SimulateUnscheduled)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
