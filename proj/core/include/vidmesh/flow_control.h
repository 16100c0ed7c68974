#ifndef VIDMESH_FLOW_CONTROL_H_
#define VIDMESH_FLOW_CONTROL_H_

#include <cstdint>
#include <vector>

#include "vidmesh/flow.h"
#include "vidmesh/network.h"

namespace vidmesh {

struct FcConfig {
  int silent_periods = 3;  // periods without a request before it decays
  double decay = 0.5;      // per further silent period
};

// Which flow-control messages got through this period, indexed e * k + s.
// Empty vectors mean every message arrived.
struct FcDelivery {
  std::vector<uint8_t> forward;   // P+(e, s) from u to v
  std::vector<uint8_t> backward;  // R(e, s) from v to u
};

// Per (node, stream) rate controllers for the whole network, stepped
// together at each period boundary. A node works from its own P+ on
// outgoing links, the P+ its upstream neighbours forwarded this period and
// the requests its downstream neighbours sent at the previous boundary.
class FlowControl {
 public:
  FlowControl(const Network& net, const MfTable& mf, FcConfig config = {});

  // p_plus[e * k + s] is this period's P+(e, s) as measured by the sender.
  void Step(const std::vector<double>& p_plus, const FcDelivery& delivery = {});

  // Request in force on e for stream s, as the sender u last heard it.
  double request(LinkId e, StreamId s) const { return known_r_[Idx(e, s)]; }
  // Request v last computed for e (what it sent backwards).
  double set_request(LinkId e, StreamId s) const { return set_r_[Idx(e, s)]; }
  // R_in of the latest step; sources: the encoder rate.
  double r_in(NodeId v, StreamId s) const { return r_in_[NodeIdx(v, s)]; }
  double encoder_rate(StreamId s) const;
  bool participates(NodeId v, StreamId s) const { return member_[NodeIdx(v, s)] != 0; }
  int periods() const { return periods_; }

  const MfTable& mf() const { return mf_; }

 private:
  size_t Idx(LinkId e, StreamId s) const { return static_cast<size_t>(e) * k_ + s; }
  size_t NodeIdx(NodeId v, StreamId s) const { return static_cast<size_t>(v) * k_ + s; }

  const Network& net_;
  MfTable mf_;
  FcConfig config_;
  int k_;
  int periods_ = 0;
  std::vector<double> set_r_;      // R(e, s) computed by v
  std::vector<double> known_r_;    // R(e, s) as known at u
  std::vector<int> r_silent_;      // periods since u last heard R(e, s)
  std::vector<double> known_pp_;   // P+(e, s) as known at v
  std::vector<double> r_in_;
  std::vector<uint8_t> member_;
};

}  // namespace vidmesh

#endif  // VIDMESH_FLOW_CONTROL_H_
