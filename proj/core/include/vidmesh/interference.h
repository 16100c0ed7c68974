#ifndef VIDMESH_INTERFERENCE_H_
#define VIDMESH_INTERFERENCE_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "vidmesh/network.h"

namespace vidmesh {

// V_{u,v,m}: nodes x outside {u, v} whose lone transmission pushes
// sinr(u,v,{x}) below mu*beta_m, or the reverse sinr(v,u,{x}) below
// mu*beta_0. Sorted by id.
std::vector<NodeId> VictimNodes(const Network& net, NodeId u, NodeId v,
                                int mcs);

// Per-link interference sets of the variable-radius model.
struct InterferenceIndex {
  // victims[e] = V_{u,v,m} U V_{v,u,m}
  std::vector<std::vector<NodeId>> victims;
  // conflicts[e] = I_e, links with an endpoint in victims[e], minus e.
  std::vector<std::vector<LinkId>> conflicts;
};

// Links with an endpoint in `victim_union`, excluding `e`. Sorted.
std::vector<LinkId> ConflictLinks(const Network& net, LinkId e,
                                  std::span<const NodeId> victim_union);

InterferenceIndex BuildInterferenceIndex(const Network& net);

// Per-link id count of e' in I_e with e not in I_e'.
int64_t CountAsymmetricConflicts(const InterferenceIndex& index);

// The conflict relation actually enforced by the LP rows and the
// schedulers. Two links may not share a (frequency, slot) cell when either
// lies in the other's I-set or they share an endpoint; links sharing an
// endpoint may not share a slot on any frequency.
class ConflictGraph {
 public:
  ConflictGraph(const Network& net, const InterferenceIndex& index);

  // Links barred from e's (j, t) cell, sorted, without e.
  const std::vector<LinkId>& same_channel(LinkId e) const {
    return same_channel_[e];
  }
  // E(u) U E(v) without e, sorted.
  const std::vector<LinkId>& shares_node(LinkId e) const {
    return shares_node_[e];
  }
  bool Conflicts(LinkId a, LinkId b) const {
    return matrix_[static_cast<size_t>(a) * n_ + b] != 0;
  }
  int num_links() const { return n_; }

 private:
  int n_;
  std::vector<std::vector<LinkId>> same_channel_;
  std::vector<std::vector<LinkId>> shares_node_;
  std::vector<uint8_t> matrix_;
};

// Graph-model conflicts among `links`: (a, b) with a < b interfere when the
// minimum distance between their endpoints is below R.
std::vector<std::pair<LinkId, LinkId>> ProtocolConflicts(
    std::span<const Node> nodes, std::span<const Link> links, double r,
    double R);

// Links of the graph model: ordered pairs closer than r (mcs 0).
std::vector<Link> ProtocolLinks(std::span<const Node> nodes, double r);

// link,u,v,mcs,victims,conflicts
void WriteInterferenceCsv(std::ostream& out, const Network& net,
                          const InterferenceIndex& index);

}  // namespace vidmesh

#endif  // VIDMESH_INTERFERENCE_H_
