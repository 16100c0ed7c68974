#include "vidmesh/interference.h"

#include <algorithm>
#include <stdexcept>

namespace vidmesh {

std::vector<NodeId> VictimNodes(const Network& net, NodeId u, NodeId v,
                                int mcs) {
  const double fwd_limit = net.radio().mu * net.mcs().at(mcs).beta;
  const double rev_limit = net.radio().mu * net.mcs().beta0();
  std::vector<NodeId> out;
  for (NodeId x = 0; x < net.num_nodes(); ++x) {
    if (x == u || x == v) continue;
    const NodeId one[] = {x};
    if (net.Sinr(u, v, one) < fwd_limit || net.Sinr(v, u, one) < rev_limit) {
      out.push_back(x);
    }
  }
  return out;
}

std::vector<LinkId> ConflictLinks(const Network& net, LinkId e,
                                  std::span<const NodeId> victim_union) {
  std::vector<LinkId> out;
  for (NodeId x : victim_union) {
    for (LinkId other : net.incident_links(x)) {
      if (other != e) out.push_back(other);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

InterferenceIndex BuildInterferenceIndex(const Network& net) {
  InterferenceIndex index;
  index.victims.resize(net.num_links());
  index.conflicts.resize(net.num_links());
  for (const Link& l : net.links()) {
    std::vector<NodeId> fwd = VictimNodes(net, l.u, l.v, l.mcs);
    std::vector<NodeId> rev = VictimNodes(net, l.v, l.u, l.mcs);
    std::vector<NodeId> both;
    std::set_union(fwd.begin(), fwd.end(), rev.begin(), rev.end(),
                   std::back_inserter(both));
    index.conflicts[l.id] = ConflictLinks(net, l.id, both);
    index.victims[l.id] = std::move(both);
  }
  return index;
}

int64_t CountAsymmetricConflicts(const InterferenceIndex& index) {
  int64_t count = 0;
  for (size_t e = 0; e < index.conflicts.size(); ++e) {
    for (LinkId other : index.conflicts[e]) {
      const auto& back = index.conflicts[other];
      if (!std::binary_search(back.begin(), back.end(),
                              static_cast<LinkId>(e))) {
        ++count;
      }
    }
  }
  return count;
}

ConflictGraph::ConflictGraph(const Network& net, const InterferenceIndex& index)
    : n_(net.num_links()),
      same_channel_(n_),
      shares_node_(n_),
      matrix_(static_cast<size_t>(n_) * n_, 0) {
  if (static_cast<int>(index.conflicts.size()) != n_) {
    throw std::invalid_argument("interference index does not match network");
  }
  auto mark = [this](LinkId a, LinkId b) {
    if (a == b) return;
    matrix_[static_cast<size_t>(a) * n_ + b] = 1;
    matrix_[static_cast<size_t>(b) * n_ + a] = 1;
  };
  for (const Link& l : net.links()) {
    for (LinkId other : index.conflicts[l.id]) mark(l.id, other);
    for (NodeId end : {l.u, l.v}) {
      for (LinkId other : net.incident_links(end)) {
        if (other == l.id) continue;
        mark(l.id, other);
        shares_node_[l.id].push_back(other);
      }
    }
  }
  for (LinkId e = 0; e < n_; ++e) {
    auto& sn = shares_node_[e];
    std::sort(sn.begin(), sn.end());
    sn.erase(std::unique(sn.begin(), sn.end()), sn.end());
    for (LinkId other = 0; other < n_; ++other) {
      if (matrix_[static_cast<size_t>(e) * n_ + other]) {
        same_channel_[e].push_back(other);
      }
    }
  }
}

std::vector<std::pair<LinkId, LinkId>> ProtocolConflicts(
    std::span<const Node> nodes, std::span<const Link> links, double r,
    double R) {
  if (!(r > 0) || R < r) {
    throw std::invalid_argument("protocol model needs R >= r > 0");
  }
  std::vector<std::pair<LinkId, LinkId>> out;
  for (size_t a = 0; a < links.size(); ++a) {
    const Node& au = nodes[links[a].u];
    const Node& av = nodes[links[a].v];
    for (size_t b = a + 1; b < links.size(); ++b) {
      const Node& bu = nodes[links[b].u];
      const Node& bv = nodes[links[b].v];
      const double d = std::min({Distance(au, bu), Distance(au, bv),
                                 Distance(av, bu), Distance(av, bv)});
      if (d < R) out.emplace_back(links[a].id, links[b].id);
    }
  }
  return out;
}

std::vector<Link> ProtocolLinks(std::span<const Node> nodes, double r) {
  std::vector<Link> links;
  for (size_t u = 0; u < nodes.size(); ++u) {
    for (size_t v = 0; v < nodes.size(); ++v) {
      if (u == v || !(Distance(nodes[u], nodes[v]) < r)) continue;
      Link l;
      l.id = static_cast<LinkId>(links.size());
      l.u = static_cast<NodeId>(u);
      l.v = static_cast<NodeId>(v);
      links.push_back(l);
    }
  }
  return links;
}

void WriteInterferenceCsv(std::ostream& out, const Network& net,
                          const InterferenceIndex& index) {
  out << "link,u,v,mcs,victims,conflicts\n";
  for (const Link& l : net.links()) {
    out << l.id << ',' << l.u << ',' << l.v << ',' << l.mcs << ','
        << index.victims[l.id].size() << ',' << index.conflicts[l.id].size()
        << '\n';
  }
}

}  // namespace vidmesh
