#include "vidmesh/network.h"

#include <algorithm>

namespace vidmesh {

Network::Network(const Scenario& scenario) : scenario_(scenario) {
  scenario_.Validate();
  links_ = BuildLinks(scenario_.nodes, scenario_.mcs, scenario_.radio);
  const int n = num_nodes();
  out_.resize(n);
  in_.resize(n);
  incident_.resize(n);
  for (const Link& l : links_) {
    out_[l.u].push_back(l.id);
    in_[l.v].push_back(l.id);
    incident_[l.u].push_back(l.id);
    incident_[l.v].push_back(l.id);
  }
  for (auto& inc : incident_) std::sort(inc.begin(), inc.end());
  power_.assign(static_cast<size_t>(n) * n, 0.0);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = 0; b < n; ++b) {
      if (a != b) {
        power_[static_cast<size_t>(a) * n + b] =
            ReceivedPower(scenario_.nodes[a], scenario_.nodes[b], radio());
      }
    }
  }
}

double Network::Sinr(NodeId tx, NodeId rx,
                     std::span<const NodeId> interferers) const {
  double interference = 0.0;
  for (NodeId x : interferers) {
    if (x == tx || x == rx) continue;
    interference += power(x, rx);
  }
  return power(tx, rx) / (radio().NoiseMw() + interference);
}

double Network::DemandPackets(StreamId s) const {
  return radio().MbpsToPacketsPerPeriod(scenario_.streams[s].demand_mbps);
}

}  // namespace vidmesh
