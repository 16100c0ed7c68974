#ifndef VIDMESH_HARNESS_H_
#define VIDMESH_HARNESS_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "vidmesh/flow.h"
#include "vidmesh/interference.h"
#include "vidmesh/metrics.h"
#include "vidmesh/network.h"
#include "vidmesh/routing.h"
#include "vidmesh/schedule.h"
#include "vidmesh/simulator.h"

namespace vidmesh {

enum class Variant { kMfIS, kShortP, kShortPS, kMfI, kMf, kMfS };

const char* VariantName(Variant v);
// Accepts the display names ("MF-I-S", "ShortP", ...), case-insensitive.
Variant ParseVariant(const std::string& name);
std::vector<Variant> AllVariants();

enum class Router { kLp, kShortp };
enum class SchedulerMode { kPathPeel, kGreedy, kGreedyAugment, kNone };

struct Wiring {
  Router router = Router::kLp;
  bool interference = true;  // LP conflict rows
  SchedulerMode scheduler = SchedulerMode::kPathPeel;
  int radios = 1;
  ChannelPolicy channels = ChannelPolicy::kRoundRobin;  // ShortP only

  bool operator==(const Wiring&) const = default;
};

Wiring WiringOf(Variant v);

// 64-bit stream of derived seeds so every random choice hangs off one root.
uint64_t DeriveSeed(uint64_t root, uint64_t tag);

// Everything about a scenario that does not depend on the variant.
struct Context {
  explicit Context(Scenario scenario);
  Scenario scenario;
  Network net;
  InterferenceIndex index;
  ConflictGraph graph;
};

struct PlanResult {
  Wiring wiring;
  bool has_lp = false;
  MultiFlow flow;
  double lp_rho = 0.0;
  double lp_flow = 0.0;  // sum_i rho_i d_i, packets per period
  double lp_seconds = 0.0;
  FlowPathSet paths;
  std::vector<Route> routes;
  bool scheduled = false;
  ScheduleTable table;
  MfTable mf;
  SupportReport support;
  int64_t scheduled_flow = 0;  // packets per period placed in the table
  int64_t deficit_slots = 0;   // greedy, before augmentation
  AugmentResult augment;
  double plan_seconds = 0.0;
};

struct PlanOptions {
  LpOptions lp;  // with_interference is taken from the wiring
  lp::SolverOptions solver;
};

PlanResult PlanWith(const Context& ctx, const Wiring& wiring, uint64_t seed,
                    const PlanOptions& options = {});
PlanResult Plan(const Context& ctx, Variant variant, uint64_t seed,
                const PlanOptions& options = {});

SimMetrics Simulate(const Context& ctx, const PlanResult& plan, SimConfig config);

struct BenchmarkSpec {
  Variant variant = Variant::kMfIS;
  std::string scenario = "grid";  // grid | circle | random | path to a JSON file
  int k = 12;
  double demand_mbps = 10.0;
  uint64_t seed = 1;
  double duration_s = 25.0;
  PlanOptions plan;
};

Scenario MakeScenario(const BenchmarkSpec& spec);

struct BenchRow {
  BenchmarkSpec spec;
  bool ok = true;
  std::string error;
  Summary summary;
  double lp_rho = 0.0;
  double scheduled_fraction = 1.0;
  int period_slots = 0;
  bool support_ok = true;
};

// Plans and simulates one variant. With a non-empty out_dir the plan dumps,
// metric CSVs and a summary go to out_dir/<scenario>_k<k>_<variant>/; a
// failing stage leaves what was written plus error.txt.
BenchRow RunBenchmark(const BenchmarkSpec& spec, const std::string& out_dir,
                      const Context* shared = nullptr);

// Plain-text table: variant, throughput min/sum/max, delay max, delay per
// hop, hops, drops, PER.
void WriteSummaryTable(std::ostream& out, const std::vector<BenchRow>& rows);
// Same columns as CSV.
void WriteSummaryCsv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace vidmesh

#endif  // VIDMESH_HARNESS_H_
