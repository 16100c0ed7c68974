#ifndef VIDMESH_NETWORK_H_
#define VIDMESH_NETWORK_H_

#include <span>
#include <vector>

#include "vidmesh/radio.h"
#include "vidmesh/scenario.h"

namespace vidmesh {

// Immutable view of a scenario's radio graph: nodes, the link set E with
// incidence lists, and a cached received-power matrix.
class Network {
 public:
  explicit Network(const Scenario& scenario);

  const Scenario& scenario() const { return scenario_; }
  const RadioConfig& radio() const { return scenario_.radio; }
  const McsTable& mcs() const { return scenario_.mcs; }
  std::span<const Node> nodes() const { return scenario_.nodes; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }
  int num_nodes() const { return static_cast<int>(scenario_.nodes.size()); }
  int num_links() const { return static_cast<int>(links_.size()); }
  int num_streams() const { return static_cast<int>(scenario_.streams.size()); }
  const std::vector<StreamRequest>& streams() const { return scenario_.streams; }

  const std::vector<LinkId>& out_links(NodeId v) const { return out_[v]; }
  const std::vector<LinkId>& in_links(NodeId v) const { return in_[v]; }
  // E(v) = E_in(v) + E_out(v), sorted by id.
  const std::vector<LinkId>& incident_links(NodeId v) const {
    return incident_[v];
  }

  // Received power at `rx` from `tx` in mW.
  double power(NodeId tx, NodeId rx) const {
    return power_[static_cast<size_t>(tx) * num_nodes() + rx];
  }
  // SINR of tx at rx given concurrent transmitters; tx and rx are skipped
  // when present in the set.
  double Sinr(NodeId tx, NodeId rx, std::span<const NodeId> interferers) const;

  // Demand of a stream in packets per period.
  double DemandPackets(StreamId s) const;

 private:
  Scenario scenario_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
  std::vector<std::vector<LinkId>> incident_;
  std::vector<double> power_;
};

}  // namespace vidmesh

#endif  // VIDMESH_NETWORK_H_
