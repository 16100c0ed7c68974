#include "vidmesh/flow.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <sstream>

#include "vidmesh/error.h"

namespace vidmesh {

MultiFlow::MultiFlow(int num_streams, int num_freq, int num_links)
    : rho_i(num_streams, 0.0),
      rejected(num_streams, false),
      k_(num_streams),
      f_(num_freq),
      e_(num_links),
      flow_(static_cast<size_t>(num_streams) * num_freq * num_links, 0.0) {}

double MultiFlow::stream_flow(int i, LinkId e) const {
  double s = 0.0;
  for (int j = 0; j < f_; ++j) s += at(i, j, e);
  return s;
}

double MultiFlow::freq_flow(int j, LinkId e) const {
  double s = 0.0;
  for (int i = 0; i < k_; ++i) s += at(i, j, e);
  return s;
}

double MultiFlow::link_flow(LinkId e) const {
  double s = 0.0;
  for (int i = 0; i < k_; ++i) s += stream_flow(i, e);
  return s;
}

int MfTable::link_total(LinkId e) const {
  int s = 0;
  for (int i = 0; i < k_; ++i) s += at(e, i);
  return s;
}

int64_t MfTable::total() const {
  int64_t s = 0;
  for (int v : mf_) s += v;
  return s;
}

namespace {

std::vector<bool> Reach(const Network& net, NodeId start, bool forward,
                        const std::vector<bool>& usable) {
  std::vector<bool> seen(net.num_nodes(), false);
  std::deque<NodeId> q{start};
  seen[start] = true;
  while (!q.empty()) {
    const NodeId x = q.front();
    q.pop_front();
    const auto& adj = forward ? net.out_links(x) : net.in_links(x);
    for (LinkId e : adj) {
      if (!usable[e]) continue;
      const NodeId y = forward ? net.link(e).v : net.link(e).u;
      if (!seen[y]) {
        seen[y] = true;
        q.push_back(y);
      }
    }
  }
  return seen;
}

std::vector<bool> LpLinks(const Network& net, bool prune) {
  std::vector<bool> keep(net.num_links(), true);
  if (!prune) return keep;
  const double mu = net.radio().mu;
  for (const Link& l : net.links()) {
    if (l.snr0 >= mu * net.mcs().at(l.mcs).beta) continue;
    for (LinkId other : net.out_links(l.u)) {
      const Link& o = net.link(other);
      if (o.v == l.v && o.mcs < l.mcs) {
        keep[l.id] = false;
        break;
      }
    }
  }
  return keep;
}

}  // namespace

bool Reachable(const Network& net, NodeId a, NodeId b) {
  return Reach(net, a, true, std::vector<bool>(net.num_links(), true))[b];
}

LpInstance BuildLp(const Network& net, const ConflictGraph* graph,
                   const LpOptions& options) {
  if (options.with_interference && graph == nullptr) {
    throw InputError("interference constraints need a conflict graph");
  }
  if (net.num_links() == 0) throw InputError("network has no links");
  const int k = net.num_streams();
  const int F = net.radio().num_freq;
  const int E = net.num_links();

  LpInstance inst;
  inst.options = options;
  inst.num_streams = k;
  inst.num_freq = F;
  inst.num_links = E;
  inst.demand.resize(k);
  inst.rejected.assign(k, false);
  inst.active.assign(k, false);
  inst.rho_i.assign(k, -1);
  lp::Problem& p = inst.problem;

  const std::vector<bool> lp_links = LpLinks(net, options.prune_degenerate_parallel);
  std::vector<std::vector<bool>> usable(k);
  double dmax = 0.0;
  for (int i = 0; i < k; ++i) {
    const StreamRequest& r = net.streams()[i];
    inst.demand[i] = net.DemandPackets(i);
    const auto from_a = Reach(net, r.source, true, lp_links);
    const auto to_b = Reach(net, r.dest, false, lp_links);
    inst.rejected[i] = !from_a[r.dest];
    inst.active[i] = !inst.rejected[i] && inst.demand[i] > 0;
    if (!inst.active[i]) continue;
    dmax = std::max(dmax, inst.demand[i]);
    usable[i].assign(E, false);
    for (const Link& l : net.links()) {
      usable[i][l.id] = lp_links[l.id] && from_a[l.u] && to_b[l.v] &&
                        l.v != r.source && l.u != r.dest;
    }
  }
  const bool any_active = dmax > 0;

  inst.rho = p.AddVariable(0.0, any_active ? lp::kInfinity : 0.0, 1.0, "rho");
  for (int i = 0; i < k; ++i) {
    if (!inst.active[i]) continue;
    inst.rho_i[i] = p.AddVariable(0.0, options.cap_rho ? 1.0 : lp::kInfinity,
                                  options.lambda * inst.demand[i] / dmax,
                                  "rho_" + std::to_string(i));
    const int row = p.AddConstraint(-lp::kInfinity, 0.0, "min_" + std::to_string(i));
    p.AddCoefficient(row, inst.rho, 1.0);
    p.AddCoefficient(row, inst.rho_i[i], -1.0);
  }

  const bool full = options.form == LpForm::kFull;
  const bool interf = options.with_interference;
  std::vector<bool> link_used(E, false);
  if (full && interf) {
    inst.f_var.assign(static_cast<size_t>(k) * F * E, -1);
    for (int i = 0; i < k; ++i) {
      if (!inst.active[i]) continue;
      for (LinkId e = 0; e < E; ++e) {
        if (!usable[i][e]) continue;
        link_used[e] = true;
        for (int j = 0; j < F; ++j) {
          std::ostringstream name;
          name << "f_" << i << '_' << j << '_' << e;
          inst.f_var[(static_cast<size_t>(i) * F + j) * E + e] =
              p.AddVariable(0.0, lp::kInfinity, 0.0, name.str());
        }
      }
    }
  } else {
    // Without interference the frequency index carries no constraint, so
    // the full form collapses to stream flows as well.
    inst.g_var.assign(static_cast<size_t>(k) * E, -1);
    for (int i = 0; i < k; ++i) {
      if (!inst.active[i]) continue;
      for (LinkId e = 0; e < E; ++e) {
        if (!usable[i][e]) continue;
        link_used[e] = true;
        std::ostringstream name;
        name << "g_" << i << '_' << e;
        inst.g_var[static_cast<size_t>(i) * E + e] =
            p.AddVariable(0.0, lp::kInfinity, 0.0, name.str());
      }
    }
    if (interf) {
      inst.h_var.assign(static_cast<size_t>(F) * E, -1);
      for (LinkId e = 0; e < E; ++e) {
        if (!link_used[e]) continue;
        for (int j = 0; j < F; ++j) {
          std::ostringstream name;
          name << "h_" << j << '_' << e;
          inst.h_var[static_cast<size_t>(j) * E + e] =
              p.AddVariable(0.0, lp::kInfinity, 0.0, name.str());
        }
      }
    }
  }
  // Stream-flow variables of (i, e): F of them in full form, one otherwise.
  auto svars = [&](int i, LinkId e) {
    std::vector<int> out;
    if (full && interf) {
      for (int j = 0; j < F; ++j) {
        const int v = inst.f_var[(static_cast<size_t>(i) * F + j) * E + e];
        if (v >= 0) out.push_back(v);
      }
    } else {
      const int v = inst.g_var[static_cast<size_t>(i) * E + e];
      if (v >= 0) out.push_back(v);
    }
    return out;
  };

  // Conservation: out - in = rho_i * d_i at the source, 0 elsewhere; the
  // sink row is implied.
  for (int i = 0; i < k; ++i) {
    if (!inst.active[i]) continue;
    const StreamRequest& r = net.streams()[i];
    for (NodeId x = 0; x < net.num_nodes(); ++x) {
      if (x == r.dest) continue;
      std::vector<std::pair<int, double>> terms;
      for (LinkId e : net.out_links(x)) {
        for (int v : svars(i, e)) terms.emplace_back(v, 1.0);
      }
      for (LinkId e : net.in_links(x)) {
        for (int v : svars(i, e)) terms.emplace_back(v, -1.0);
      }
      if (terms.empty()) continue;
      const int row = p.AddConstraint(0.0, 0.0,
                                      "flow_" + std::to_string(i) + "_" + std::to_string(x));
      for (auto [v, c] : terms) p.AddCoefficient(row, v, c);
      if (x == r.source) p.AddCoefficient(row, inst.rho_i[i], -inst.demand[i]);
    }
  }

  // Capacity.
  for (const Link& l : net.links()) {
    if (!link_used[l.id]) continue;
    const int row = p.AddConstraint(-lp::kInfinity, l.cap, "cap_" + std::to_string(l.id));
    for (int i = 0; i < k; ++i) {
      if (!inst.active[i]) continue;
      for (int v : svars(i, l.id)) p.AddCoefficient(row, v, 1.0);
    }
  }

  if (!interf) return inst;

  if (!full) {
    for (LinkId e = 0; e < E; ++e) {
      if (!link_used[e]) continue;
      const int row = p.AddConstraint(0.0, 0.0, "split_" + std::to_string(e));
      for (int i = 0; i < k; ++i) {
        if (!inst.active[i]) continue;
        for (int v : svars(i, e)) p.AddCoefficient(row, v, 1.0);
      }
      for (int j = 0; j < F; ++j) {
        p.AddCoefficient(row, inst.h_var[static_cast<size_t>(j) * E + e], -1.0);
      }
    }
  }

  // Frequency-load terms f^j(e') / c(e').
  auto add_load = [&](int row, LinkId e, int j) {
    if (!link_used[e]) return;
    const double coef = 1.0 / net.link(e).cap;
    if (full) {
      for (int i = 0; i < k; ++i) {
        const int v = inst.f_var[(static_cast<size_t>(i) * F + j) * E + e];
        if (v >= 0) p.AddCoefficient(row, v, coef);
      }
    } else {
      p.AddCoefficient(row, inst.h_var[static_cast<size_t>(j) * E + e], coef);
    }
  };
  for (LinkId e = 0; e < E; ++e) {
    if (!lp_links[e]) continue;
    bool any = link_used[e];
    for (LinkId o : graph->same_channel(e)) any = any || link_used[o];
    if (!any) continue;
    for (int j = 0; j < F; ++j) {
      std::ostringstream name;
      name << "conf_" << e << '_' << j;
      const int row = p.AddConstraint(-lp::kInfinity, 1.0, name.str());
      add_load(row, e, j);
      for (LinkId o : graph->same_channel(e)) add_load(row, o, j);
      for (int jj = 0; jj < F; ++jj) {
        if (jj == j) continue;
        if (options.freq_sum == ConflictFreqSum::kLower && jj > j) continue;
        add_load(row, e, jj);
        for (LinkId o : graph->shares_node(e)) add_load(row, o, jj);
      }
    }
  }
  return inst;
}

MultiFlow SolveLp(const LpInstance& inst, const lp::SolverOptions& solver) {
  const int k = inst.num_streams;
  const int F = inst.num_freq;
  const int E = inst.num_links;
  MultiFlow flow(k, F, E);
  flow.rejected = inst.rejected;

  const lp::Solution sol = lp::SolveWith(inst.problem, solver);
  const double violation = sol.x.empty() ? 0.0 : inst.problem.MaxViolation(sol.x);
  if (sol.status != lp::Status::kOptimal || violation > 1e-6) {
    std::ostringstream lp_text;
    inst.problem.WriteLp(lp_text);
    std::ostringstream what;
    what << "LP solve failed: " << lp::StatusName(sol.status)
         << " (max violation " << violation << ")";
    throw LpSolveError(what.str(), lp_text.str());
  }
  auto value = [&](int v) { return v >= 0 ? std::max(0.0, sol.x[v]) : 0.0; };

  const bool full = inst.options.form == LpForm::kFull && inst.options.with_interference;
  for (int i = 0; i < k; ++i) {
    if (!inst.active[i]) continue;
    for (LinkId e = 0; e < E; ++e) {
      if (full) {
        for (int j = 0; j < F; ++j) {
          flow.at(i, j, e) = value(inst.f_var[(static_cast<size_t>(i) * F + j) * E + e]);
        }
        continue;
      }
      const double g = value(inst.g_var[static_cast<size_t>(i) * E + e]);
      if (g == 0.0) continue;
      double t = 0.0;
      if (inst.options.with_interference) {
        for (int j = 0; j < F; ++j) t += value(inst.h_var[static_cast<size_t>(j) * E + e]);
      }
      for (int j = 0; j < F; ++j) {
        flow.at(i, j, e) = t > 1e-12
                               ? g * value(inst.h_var[static_cast<size_t>(j) * E + e]) / t
                               : g / F;
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    if (inst.active[i]) {
      flow.rho_i[i] = value(inst.rho_i[i]);
    } else {
      flow.rho_i[i] = inst.rejected[i] ? 0.0 : 1.0;
    }
  }
  flow.rho = value(inst.rho);
  return flow;
}

namespace {

// Finds one directed cycle among links with flow[e] > eps. Returns its
// links, or an empty vector.
std::vector<LinkId> FindCycle(const Network& net, const std::vector<double>& flow,
                              double eps) {
  const int n = net.num_nodes();
  std::vector<int> color(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<LinkId> via(n, -1);
  std::vector<size_t> next(n, 0);
  for (NodeId root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    std::vector<NodeId> stack{root};
    color[root] = 1;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      const auto& out = net.out_links(x);
      if (next[x] == out.size()) {
        color[x] = 2;
        stack.pop_back();
        continue;
      }
      const LinkId e = out[next[x]++];
      if (flow[e] <= eps) continue;
      const NodeId y = net.link(e).v;
      if (color[y] == 1) {
        std::vector<LinkId> cycle{e};
        for (NodeId z = x; z != y; z = net.link(via[z]).u) cycle.push_back(via[z]);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (color[y] == 0) {
        color[y] = 1;
        via[y] = e;
        stack.push_back(y);
      }
    }
  }
  return {};
}

constexpr double kFlowEps = 1e-9;

}  // namespace

bool HasCycle(const Network& net, const std::vector<double>& link_flow,
              double eps) {
  return !FindCycle(net, link_flow, eps).empty();
}

void RemoveCycles(const Network& net, MultiFlow& flow) {
  const int E = net.num_links();
  for (int i = 0; i < flow.num_streams(); ++i) {
    std::vector<double> agg(E);
    for (LinkId e = 0; e < E; ++e) agg[e] = flow.stream_flow(i, e);
    for (;;) {
      const std::vector<LinkId> cycle = FindCycle(net, agg, kFlowEps);
      if (cycle.empty()) break;
      double delta = std::numeric_limits<double>::infinity();
      LinkId argmin = cycle.front();
      for (LinkId e : cycle) {
        if (agg[e] < delta) {
          delta = agg[e];
          argmin = e;
        }
      }
      for (LinkId e : cycle) {
        const double next = e == argmin ? 0.0 : std::max(0.0, agg[e] - delta);
        const double scale = agg[e] > 0 ? next / agg[e] : 0.0;
        for (int j = 0; j < flow.num_freq(); ++j) flow.at(i, j, e) *= scale;
        agg[e] = next;
      }
    }
  }
}

std::vector<LinkId> ShortestLexPath(const Network& net, NodeId a, NodeId b,
                                    const std::vector<bool>& usable) {
  const int n = net.num_nodes();
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> dist(n, kUnreached);
  std::deque<NodeId> q{b};
  dist[b] = 0;
  while (!q.empty()) {
    const NodeId x = q.front();
    q.pop_front();
    for (LinkId e : net.in_links(x)) {
      if (!usable[e]) continue;
      const NodeId y = net.link(e).u;
      if (dist[y] == kUnreached) {
        dist[y] = dist[x] + 1;
        q.push_back(y);
      }
    }
  }
  if (a == b || dist[a] == kUnreached) return {};
  std::vector<LinkId> path;
  for (NodeId x = a; x != b;) {
    LinkId best = -1;
    for (LinkId e : net.out_links(x)) {
      if (!usable[e]) continue;
      const Link& l = net.link(e);
      if (dist[l.v] != dist[x] - 1) continue;
      if (best < 0 || l.v < net.link(best).v ||
          (l.v == net.link(best).v && e < best)) {
        best = e;
      }
    }
    path.push_back(best);
    x = net.link(best).v;
  }
  return path;
}

MfTable RoundToMf(const Network& net, const MultiFlow& flow) {
  const int E = net.num_links();
  MfTable mf(E, flow.num_streams());
  for (int i = 0; i < flow.num_streams(); ++i) {
    const StreamRequest& r = net.streams()[i];
    std::vector<double> rem(E);
    std::vector<bool> usable(E);
    for (LinkId e = 0; e < E; ++e) {
      rem[e] = flow.stream_flow(i, e);
      usable[e] = rem[e] > kFlowEps;
    }
    for (;;) {
      const std::vector<LinkId> path = ShortestLexPath(net, r.source, r.dest, usable);
      if (path.empty()) break;
      double val = std::numeric_limits<double>::infinity();
      for (LinkId e : path) val = std::min(val, rem[e]);
      const int whole = static_cast<int>(std::floor(val + 1e-9));
      for (LinkId e : path) {
        rem[e] -= val;
        if (rem[e] <= kFlowEps) usable[e] = false;
        mf.at(e, i) += whole;
      }
    }
  }
  return mf;
}

FlowPathSet DecomposePaths(const Network& net, const MfTable& mf) {
  const int E = net.num_links();
  FlowPathSet out;
  out.paths.resize(mf.num_streams());
  out.residue.assign(mf.num_streams(), 0);
  for (int i = 0; i < mf.num_streams(); ++i) {
    const StreamRequest& r = net.streams()[i];
    std::vector<int> rem(E);
    std::vector<bool> usable(E);
    for (LinkId e = 0; e < E; ++e) {
      rem[e] = mf.at(e, i);
      if (rem[e] < 0) throw ConsistencyError("negative mf entry");
      usable[e] = rem[e] > 0;
    }
    for (;;) {
      const std::vector<LinkId> path = ShortestLexPath(net, r.source, r.dest, usable);
      if (path.empty()) break;
      // The same path stays shortest and lexicographically first until one
      // of its links is exhausted.
      for (;;) {
        int val = std::numeric_limits<int>::max();
        for (LinkId e : path) val = std::min({val, rem[e], net.link(e).pps});
        if (val <= 0) break;
        for (LinkId e : path) rem[e] -= val;
        out.paths[i].push_back({i, path, val});
      }
      for (LinkId e : path) usable[e] = rem[e] > 0;
    }
    int left = 0;
    for (LinkId e = 0; e < E; ++e) left += rem[e];
    if (left > 0) {
      throw ConsistencyError("stream " + std::to_string(i) + ": " +
                             std::to_string(left) +
                             " packets of flow left with no source-to-sink path");
    }
  }
  return out;
}

void WriteFlowCsv(std::ostream& out, const Network& net, const MultiFlow& flow) {
  out << "stream,freq,link,u,v,mcs,flow\n";
  out << std::fixed << std::setprecision(6);
  for (int i = 0; i < flow.num_streams(); ++i) {
    for (int j = 0; j < flow.num_freq(); ++j) {
      for (const Link& l : net.links()) {
        const double f = flow.at(i, j, l.id);
        if (f <= kFlowEps) continue;
        out << i << ',' << j << ',' << l.id << ',' << l.u << ',' << l.v << ','
            << l.mcs << ',' << f << '\n';
      }
    }
  }
}

}  // namespace vidmesh
