#include "vidmesh/schedule.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "vidmesh/error.h"

namespace vidmesh {

ScheduleTable::ScheduleTable(int num_freq, int num_slots)
    : num_freq_(num_freq),
      num_slots_(num_slots),
      cells_(static_cast<size_t>(num_freq) * num_slots) {
  if (num_freq < 1 || num_slots < 1) throw InputError("empty schedule table");
}

void ScheduleTable::Add(int j, int t, LinkId e) {
  cells_[static_cast<size_t>(t) * num_freq_ + j].push_back(e);
}

void ScheduleTable::Remove(int j, int t, LinkId e) {
  auto& c = cells_[static_cast<size_t>(t) * num_freq_ + j];
  auto it = std::find(c.begin(), c.end(), e);
  if (it != c.end()) c.erase(it);
}

int ScheduleTable::AppendSlot() {
  cells_.resize(cells_.size() + num_freq_);
  return num_slots_++;
}

int ScheduleTable::Occurrences(LinkId e) const {
  int n = 0;
  for (const auto& c : cells_) n += static_cast<int>(std::count(c.begin(), c.end(), e));
  return n;
}

int64_t ScheduleTable::Placements() const {
  int64_t n = 0;
  for (const auto& c : cells_) n += static_cast<int64_t>(c.size());
  return n;
}

int64_t GreedyResult::deficit_slots() const {
  int64_t n = 0;
  for (const Deficit& d : deficit) n += d.slots;
  return n;
}

double PeelResult::ScheduledFraction() const {
  const int64_t w = std::accumulate(wanted.begin(), wanted.end(), int64_t{0});
  const int64_t s = std::accumulate(scheduled.begin(), scheduled.end(), int64_t{0});
  return w > 0 ? static_cast<double>(s) / static_cast<double>(w) : 1.0;
}

namespace {

// Table plus a per-slot record of which node's radio is taken.
class Occupancy {
 public:
  Occupancy(const Network& net, const ConflictGraph& graph, ScheduleTable& table)
      : net_(net), graph_(graph), table_(table), n_(net.num_nodes()),
        load_(table.num_freq(), 0) {
    busy_.assign(static_cast<size_t>(table.num_slots()) * n_, -1);
  }

  bool Feasible(LinkId e, int j, int t) const {
    const Link& l = net_.link(e);
    if (Busy(t, l.u) >= 0 || Busy(t, l.v) >= 0) return false;
    for (LinkId o : table_.cell(j, t)) {
      if (graph_.Conflicts(e, o)) return false;
    }
    return true;
  }

  void Place(LinkId e, int j, int t) {
    const Link& l = net_.link(e);
    table_.Add(j, t, e);
    busy_[static_cast<size_t>(t) * n_ + l.u] = e;
    busy_[static_cast<size_t>(t) * n_ + l.v] = e;
    ++load_[j];
  }

  void Unplace(LinkId e, int j, int t) {
    const Link& l = net_.link(e);
    table_.Remove(j, t, e);
    busy_[static_cast<size_t>(t) * n_ + l.u] = -1;
    busy_[static_cast<size_t>(t) * n_ + l.v] = -1;
    --load_[j];
  }

  int AppendSlot() {
    busy_.resize(busy_.size() + n_, -1);
    return table_.AppendSlot();
  }

  // Channels by ascending occupancy, ties by index.
  std::vector<int> FreqOrder() const {
    std::vector<int> order(load_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return load_[a] < load_[b]; });
    return order;
  }

  int slots() const { return table_.num_slots(); }

 private:
  int Busy(int t, NodeId x) const { return busy_[static_cast<size_t>(t) * n_ + x]; }

  const Network& net_;
  const ConflictGraph& graph_;
  ScheduleTable& table_;
  int n_;
  std::vector<int> busy_;
  std::vector<int> load_;
};

// Splits `capacity` packets over streams in proportion to `want`, floor
// plus largest remainders (ties by stream index).
std::vector<int> Apportion(int capacity, const std::vector<int>& want) {
  const int64_t total = std::accumulate(want.begin(), want.end(), int64_t{0});
  std::vector<int> out(want.size(), 0);
  if (total <= capacity) return want;
  std::vector<std::pair<double, int>> rem;
  int given = 0;
  for (size_t s = 0; s < want.size(); ++s) {
    const double q = static_cast<double>(capacity) * want[s] / static_cast<double>(total);
    out[s] = static_cast<int>(q);
    given += out[s];
    rem.emplace_back(q - out[s], static_cast<int>(s));
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t r = 0; r < rem.size() && given < capacity; ++r) {
    ++out[rem[r].second];
    ++given;
  }
  return out;
}

void FillMf(const Network& net, const ScheduleTable& table, const MfTable& target,
            MfTable& mf) {
  const int k = target.num_streams();
  for (LinkId e = 0; e < net.num_links(); ++e) {
    std::vector<int> want(k);
    bool any = false;
    for (int s = 0; s < k; ++s) {
      want[s] = target.at(e, s);
      any = any || want[s] > 0;
    }
    if (!any) continue;
    const int capacity = table.Occurrences(e) * net.link(e).pps;
    const std::vector<int> got = Apportion(capacity, want);
    for (int s = 0; s < k; ++s) mf.at(e, s) = got[s];
  }
}

}  // namespace

GreedyResult GreedySchedule(const Network& net, const ConflictGraph& graph,
                            const MultiFlow& flow, const MfTable& target) {
  const int F = net.radio().num_freq;
  const int T = net.radio().num_slots;
  const int E = net.num_links();
  if (flow.num_freq() != F || flow.num_links() != E) {
    throw InputError("flow does not match the network");
  }
  GreedyResult res;
  res.table = ScheduleTable(F, T);
  res.mf = MfTable(E, net.num_streams());
  res.wanted.assign(static_cast<size_t>(E) * F, 0);

  struct Item {
    double load;
    LinkId e;
    int j;
  };
  std::vector<Item> items;
  for (LinkId e = 0; e < E; ++e) {
    const Link& l = net.link(e);
    for (int j = 0; j < F; ++j) {
      const double f = flow.freq_flow(j, e);
      // Tolerate solver noise just below an integer multiple of pps.
      const int slots = static_cast<int>(std::floor(f / l.pps + 1e-7));
      if (slots <= 0) continue;
      res.wanted[static_cast<size_t>(e) * F + j] = slots;
      items.push_back({f / l.cap, e, j});
    }
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.load != b.load) return a.load > b.load;
    if (a.e != b.e) return a.e < b.e;
    return a.j < b.j;
  });

  Occupancy occ(net, graph, res.table);
  for (const Item& it : items) {
    int need = res.wanted[static_cast<size_t>(it.e) * F + it.j];
    for (int t = 0; t < T && need > 0; ++t) {
      if (!occ.Feasible(it.e, it.j, t)) continue;
      occ.Place(it.e, it.j, t);
      --need;
    }
    if (need > 0) res.deficit.push_back({it.e, it.j, need});
  }
  FillMf(net, res.table, target, res.mf);
  return res;
}

AugmentResult AugmentSchedule(const Network& net, const ConflictGraph& graph,
                              const MfTable& target, GreedyResult& result) {
  const int T = result.table.num_slots();
  Occupancy occ(net, graph, result.table);
  // Rebuild the radio record for the existing slots.
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < result.table.num_freq(); ++j) {
      const std::vector<LinkId> cell = result.table.cell(j, t);
      for (LinkId e : cell) {
        result.table.Remove(j, t, e);
        occ.Place(e, j, t);
      }
    }
  }
  for (const Deficit& d : result.deficit) {
    for (int n = 0; n < d.slots; ++n) {
      int slot = -1;
      for (int t = T; t < occ.slots(); ++t) {
        if (occ.Feasible(d.link, d.freq, t)) {
          slot = t;
          break;
        }
      }
      if (slot < 0) slot = occ.AppendSlot();
      occ.Place(d.link, d.freq, slot);
    }
  }
  result.deficit.clear();
  FillMf(net, result.table, target, result.mf);

  AugmentResult aug;
  aug.period = result.table.num_slots();
  aug.added_slots = aug.period - T;
  aug.dilution = static_cast<double>(T) / aug.period;
  return aug;
}

PeelResult PathPeelSchedule(const Network& net, const ConflictGraph& graph,
                            const FlowPathSet& paths, const PeelOptions& options) {
  const int F = net.radio().num_freq;
  const int T = net.radio().num_slots;
  const int k = static_cast<int>(paths.paths.size());
  if (options.freq_choice == FreqChoice::kFixed &&
      static_cast<int>(options.stream_freq.size()) != k) {
    throw InputError("fixed channel choice needs one channel per stream");
  }
  PeelResult res;
  res.table = ScheduleTable(F, T);
  res.mf = MfTable(net.num_links(), k);
  res.wanted.assign(k, 0);
  res.scheduled.assign(k, 0);
  for (int i = 0; i < k; ++i) {
    for (const FlowPath& p : paths.paths[i]) res.wanted[i] += p.val;
    res.paths_total += static_cast<int>(paths.paths[i].size());
  }

  Occupancy occ(net, graph, res.table);
  std::vector<size_t> next(k, 0);
  std::vector<std::set<std::vector<LinkId>>> failed(k);
  int start = 0;
  struct Spot {
    LinkId e;
    int j, t;
  };
  std::vector<Spot> placed;

  auto place_path = [&](int i, const FlowPath& p) {
    placed.clear();
    int prev = -1;
    for (LinkId e : p.links) {
      const int from = prev < 0 ? start : (prev + 1) % T;
      bool ok = false;
      for (int d = 0; d < T && !ok; ++d) {
        const int t = (from + d) % T;
        if (options.freq_choice == FreqChoice::kFixed) {
          const int j = options.stream_freq[i];
          if (occ.Feasible(e, j, t)) {
            occ.Place(e, j, t);
            placed.push_back({e, j, t});
            ok = true;
          }
          continue;
        }
        for (int j : occ.FreqOrder()) {
          if (occ.Feasible(e, j, t)) {
            occ.Place(e, j, t);
            placed.push_back({e, j, t});
            ok = true;
            break;
          }
        }
      }
      if (!ok) {
        for (const Spot& s : placed) occ.Unplace(s.e, s.j, s.t);
        return false;
      }
      prev = placed.back().t;
    }
    return true;
  };

  bool more = true;
  while (more) {
    more = false;
    for (int i = 0; i < k; ++i) {
      if (next[i] >= paths.paths[i].size()) continue;
      const FlowPath& p = paths.paths[i][next[i]++];
      more = more || next[i] < paths.paths[i].size();
      if (p.links.empty() || p.val <= 0) continue;
      if (failed[i].count(p.links)) continue;
      if (!place_path(i, p)) {
        failed[i].insert(p.links);
        continue;
      }
      start = (placed.front().t + 1) % T;
      for (LinkId e : p.links) res.mf.at(e, i) += p.val;
      res.scheduled[i] += p.val;
      ++res.paths_placed;
    }
  }
  return res;
}

FlowPathSet RoutesToPaths(const Network& net, const std::vector<Route>& routes) {
  FlowPathSet out;
  out.paths.resize(net.num_streams());
  out.residue.assign(net.num_streams(), 0);
  for (const Route& r : routes) {
    if (r.links.empty()) continue;
    int bottleneck = net.link(r.links.front()).pps;
    for (LinkId e : r.links) bottleneck = std::min(bottleneck, net.link(e).pps);
    int rem = static_cast<int>(std::floor(r.weight));
    while (rem > 0) {
      const int val = std::min(rem, bottleneck);
      out.paths[r.stream].push_back({r.stream, r.links, val});
      rem -= val;
    }
  }
  return out;
}

std::string SupportViolation::Describe(const Network& net) const {
  std::ostringstream os;
  auto name = [&](LinkId e) {
    std::ostringstream n;
    const Link& l = net.link(e);
    n << "link " << e << " (" << l.u << "->" << l.v << ", mcs " << l.mcs << ")";
    return n.str();
  };
  switch (kind) {
    case Kind::kCapacity:
      os << "capacity: " << name(a) << " carries more mf than its slots allow";
      break;
    case Kind::kRadio:
      os << "radio: " << name(a) << " and " << name(b) << " share a node in slot " << slot;
      break;
    case Kind::kConflict:
      os << "conflict: " << name(a) << " and " << name(b) << " in cell (" << freq << ", "
         << slot << ")";
      break;
  }
  return os.str();
}

SupportReport VerifySupport(const Network& net, const ConflictGraph& graph,
                            const ScheduleTable& table, const MfTable& mf) {
  SupportReport rep;
  std::vector<int> occurrences(net.num_links(), 0);
  std::vector<LinkId> owner(net.num_nodes(), -1);
  for (int t = 0; t < table.num_slots(); ++t) {
    std::fill(owner.begin(), owner.end(), -1);
    for (int j = 0; j < table.num_freq(); ++j) {
      const auto& cell = table.cell(j, t);
      for (size_t x = 0; x < cell.size(); ++x) {
        const LinkId e = cell[x];
        ++occurrences[e];
        for (NodeId node : {net.link(e).u, net.link(e).v}) {
          if (owner[node] >= 0 && owner[node] != e) {
            rep.violations.push_back(
                {SupportViolation::Kind::kRadio, owner[node], e, j, t});
          } else if (owner[node] == e) {
            rep.violations.push_back({SupportViolation::Kind::kRadio, e, e, j, t});
          }
        }
        owner[net.link(e).u] = e;
        owner[net.link(e).v] = e;
        for (size_t y = x + 1; y < cell.size(); ++y) {
          if (graph.Conflicts(e, cell[y])) {
            rep.violations.push_back(
                {SupportViolation::Kind::kConflict, e, cell[y], j, t});
          }
        }
      }
    }
  }
  for (LinkId e = 0; e < net.num_links(); ++e) {
    if (mf.link_total(e) > occurrences[e] * net.link(e).pps) {
      rep.violations.push_back({SupportViolation::Kind::kCapacity, e, -1, -1, -1});
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

void WriteTableCsv(std::ostream& out, const Network& net, const ScheduleTable& table) {
  out << "freq,slot,link,u,v,mcs\n";
  for (int j = 0; j < table.num_freq(); ++j) {
    for (int t = 0; t < table.num_slots(); ++t) {
      for (LinkId e : table.cell(j, t)) {
        const Link& l = net.link(e);
        out << j << ',' << t << ',' << e << ',' << l.u << ',' << l.v << ',' << l.mcs << '\n';
      }
    }
  }
}

void WriteMfCsv(std::ostream& out, const MfTable& mf) {
  out << "link,stream,packets\n";
  for (LinkId e = 0; e < mf.num_links(); ++e) {
    for (int s = 0; s < mf.num_streams(); ++s) {
      if (mf.at(e, s) > 0) out << e << ',' << s << ',' << mf.at(e, s) << '\n';
    }
  }
}

namespace {

std::vector<std::vector<long long>> ReadIntRows(std::istream& in, size_t width,
                                                const char* what) {
  std::vector<std::vector<long long>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<long long> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stoll(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw InputError(std::string("bad ") + what + " row: " + line);
      }
    }
    if (row.size() != width) throw InputError(std::string("bad ") + what + " row: " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ScheduleTable ReadTableCsv(std::istream& in, const Network& net, int min_slots) {
  const auto rows = ReadIntRows(in, 6, "table");
  int slots = min_slots;
  for (const auto& r : rows) slots = std::max<int>(slots, static_cast<int>(r[1]) + 1);
  ScheduleTable table(net.radio().num_freq, slots);
  for (const auto& r : rows) {
    const long long j = r[0], t = r[1], e = r[2];
    if (j < 0 || j >= table.num_freq() || t < 0 || e < 0 || e >= net.num_links()) {
      throw InputError("table row out of range");
    }
    const Link& l = net.link(static_cast<LinkId>(e));
    if (l.u != r[3] || l.v != r[4] || l.mcs != r[5]) {
      throw InputError("table row does not match link " + std::to_string(e));
    }
    table.Add(static_cast<int>(j), static_cast<int>(t), static_cast<LinkId>(e));
  }
  return table;
}

MfTable ReadMfCsv(std::istream& in, const Network& net) {
  MfTable mf(net.num_links(), net.num_streams());
  for (const auto& r : ReadIntRows(in, 3, "mf")) {
    if (r[0] < 0 || r[0] >= net.num_links() || r[1] < 0 || r[1] >= net.num_streams() ||
        r[2] < 0) {
      throw InputError("mf row out of range");
    }
    mf.at(static_cast<LinkId>(r[0]), static_cast<int>(r[1])) = static_cast<int>(r[2]);
  }
  return mf;
}

}  // namespace vidmesh
