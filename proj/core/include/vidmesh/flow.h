#ifndef VIDMESH_FLOW_H_
#define VIDMESH_FLOW_H_

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidmesh/interference.h"
#include "vidmesh/lp/problem.h"
#include "vidmesh/lp/solver.h"
#include "vidmesh/network.h"

namespace vidmesh {

enum class ConflictFreqSum { kAllOther, kLower };
enum class LpForm { kCompact, kFull };

struct LpOptions {
  bool with_interference = true;
  double lambda = 1.0 / 20.0;
  bool cap_rho = false;  // add rho_i <= 1
  ConflictFreqSum freq_sum = ConflictFreqSum::kAllOther;
  LpForm form = LpForm::kCompact;
  // Leave out parallel links (u, v, m) with snr0 < mu * beta_m when a lower
  // MCS link joins the same ordered pair.
  bool prune_degenerate_parallel = true;
};

// The max-min multi-commodity flow program over a network. Flows are in
// packets per period.
struct LpInstance {
  lp::Problem problem{lp::Sense::kMaximize};
  LpOptions options;
  int num_streams = 0;
  int num_freq = 0;
  int num_links = 0;
  std::vector<double> demand;   // packets per period
  std::vector<bool> rejected;   // no a->b path
  std::vector<bool> active;     // in the objective (not rejected, demand > 0)
  int rho = -1;
  std::vector<int> rho_i;       // -1 when not active
  // kFull: f[(i*F + j)*E + e]; kCompact: g[i*E + e] and h[j*E + e].
  // Entries are -1 where no variable exists.
  std::vector<int> f_var, g_var, h_var;
};

// Real-valued flows f_i^j(e) plus the achieved service ratios.
class MultiFlow {
 public:
  MultiFlow() = default;
  MultiFlow(int num_streams, int num_freq, int num_links);

  int num_streams() const { return k_; }
  int num_freq() const { return f_; }
  int num_links() const { return e_; }

  double& at(int i, int j, LinkId e) { return flow_[(static_cast<size_t>(i) * f_ + j) * e_ + e]; }
  double at(int i, int j, LinkId e) const { return flow_[(static_cast<size_t>(i) * f_ + j) * e_ + e]; }
  double stream_flow(int i, LinkId e) const;  // f_i(e)
  double freq_flow(int j, LinkId e) const;    // f^j(e)
  double link_flow(LinkId e) const;           // sum over i, j

  std::vector<double> rho_i;
  double rho = 0.0;
  std::vector<bool> rejected;

 private:
  int k_ = 0, f_ = 0, e_ = 0;
  std::vector<double> flow_;
};

// mf(e, s): integer packets per period.
class MfTable {
 public:
  MfTable() = default;
  MfTable(int num_links, int num_streams)
      : e_(num_links), k_(num_streams), mf_(static_cast<size_t>(num_links) * num_streams, 0) {}

  int num_links() const { return e_; }
  int num_streams() const { return k_; }
  int& at(LinkId e, int s) { return mf_[static_cast<size_t>(e) * k_ + s]; }
  int at(LinkId e, int s) const { return mf_[static_cast<size_t>(e) * k_ + s]; }
  int link_total(LinkId e) const;
  int64_t total() const;

 private:
  int e_ = 0, k_ = 0;
  std::vector<int> mf_;
};

struct FlowPath {
  StreamId stream = 0;
  std::vector<LinkId> links;
  int val = 0;  // packets per period
};

struct FlowPathSet {
  // paths[i] in discovery order.
  std::vector<std::vector<FlowPath>> paths;
  std::vector<int> residue;  // per stream, dropped sub-bottleneck flow
};

class LpSolveError : public std::runtime_error {
 public:
  LpSolveError(const std::string& what, std::string lp_text)
      : std::runtime_error(what), lp_text_(std::move(lp_text)) {}
  const std::string& lp_text() const { return lp_text_; }

 private:
  std::string lp_text_;
};

// True when b is reachable from a over the link set.
bool Reachable(const Network& net, NodeId a, NodeId b);

// Builds the program. `graph` may be null when options.with_interference is
// false.
LpInstance BuildLp(const Network& net, const ConflictGraph* graph,
                   const LpOptions& options);

// Solves and disaggregates. Throws LpSolveError with the LP text attached if
// the solver does not reach optimality.
MultiFlow SolveLp(const LpInstance& instance,
                  const lp::SolverOptions& solver = {});

// Cancels directed cycles of each stream's aggregate flow, scaling the
// per-frequency components proportionally. Terminal net flows are kept.
void RemoveCycles(const Network& net, MultiFlow& flow);

// Floor-rounds a cycle-free flow per extracted path, giving integer flows
// that conserve at intermediate nodes.
MfTable RoundToMf(const Network& net, const MultiFlow& flow);

// Peels each stream's mf into paths with val = min(bottleneck pps,
// remaining). Throws ConsistencyError when positive flow is left with no
// source-to-sink path.
FlowPathSet DecomposePaths(const Network& net, const MfTable& mf);

// Shortest a->b path (hops, then lexicographically smallest node sequence)
// over links with usable[e]; returns an empty vector when none.
std::vector<LinkId> ShortestLexPath(const Network& net, NodeId a, NodeId b,
                                    const std::vector<bool>& usable);

// stream,freq,link,u,v,mcs,flow
void WriteFlowCsv(std::ostream& out, const Network& net, const MultiFlow& flow);

// True when the stream's positive-flow subgraph contains a directed cycle.
bool HasCycle(const Network& net, const std::vector<double>& link_flow,
              double eps = 1e-9);

}  // namespace vidmesh

#endif  // VIDMESH_FLOW_H_
