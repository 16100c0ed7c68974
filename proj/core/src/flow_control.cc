#include "vidmesh/flow_control.h"

#include <algorithm>

#include "vidmesh/error.h"

namespace vidmesh {

FlowControl::FlowControl(const Network& net, const MfTable& mf, FcConfig config)
    : net_(net), mf_(mf), config_(config), k_(mf.num_streams()) {
  if (mf.num_links() != net.num_links() || k_ != net.num_streams()) {
    throw InputError("mf table does not match the network");
  }
  const size_t cells = static_cast<size_t>(net.num_links()) * k_;
  set_r_.assign(cells, 0.0);
  r_silent_.assign(cells, 0);
  for (LinkId e = 0; e < net.num_links(); ++e) {
    for (int s = 0; s < k_; ++s) set_r_[Idx(e, s)] = mf.at(e, s);
  }
  known_r_ = set_r_;
  known_pp_ = set_r_;

  r_in_.assign(static_cast<size_t>(net.num_nodes()) * k_, 0.0);
  member_.assign(r_in_.size(), 0);
  for (int s = 0; s < k_; ++s) {
    member_[NodeIdx(net.streams()[s].source, s)] = 1;
    for (LinkId e = 0; e < net.num_links(); ++e) {
      if (mf.at(e, s) <= 0) continue;
      member_[NodeIdx(net.link(e).u, s)] = 1;
      member_[NodeIdx(net.link(e).v, s)] = 1;
    }
    for (NodeId v = 0; v < net.num_nodes(); ++v) {
      double in = 0.0, out = 0.0;
      for (LinkId e : net.in_links(v)) in += mf.at(e, s);
      for (LinkId e : net.out_links(v)) out += mf.at(e, s);
      r_in_[NodeIdx(v, s)] = v == net.streams()[s].source ? out : in;
    }
  }
}

double FlowControl::encoder_rate(StreamId s) const {
  return r_in(net_.streams()[s].source, s);
}

void FlowControl::Step(const std::vector<double>& p_plus, const FcDelivery& delivery) {
  const size_t cells = static_cast<size_t>(net_.num_links()) * k_;
  if (p_plus.size() != cells) throw InputError("P+ vector has the wrong size");
  auto arrived = [](const std::vector<uint8_t>& mask, size_t i) {
    return mask.empty() || mask[i] != 0;
  };

  for (size_t i = 0; i < cells; ++i) {
    if (arrived(delivery.forward, i)) known_pp_[i] = p_plus[i];
  }

  for (int s = 0; s < k_; ++s) {
    const StreamRequest& req = net_.streams()[s];
    for (NodeId v = 0; v < net_.num_nodes(); ++v) {
      if (!member_[NodeIdx(v, s)]) continue;
      if (v == req.dest) {
        double in = 0.0;
        for (LinkId e : net_.in_links(v)) {
          set_r_[Idx(e, s)] = mf_.at(e, s);
          in += mf_.at(e, s);
        }
        r_in_[NodeIdx(v, s)] = in;
        continue;
      }
      double out_r = 0.0, out_pp = 0.0, in_pp = 0.0;
      for (LinkId e : net_.out_links(v)) {
        if (mf_.at(e, s) <= 0) continue;
        out_r += known_r_[Idx(e, s)];
        out_pp += p_plus[Idx(e, s)];
      }
      for (LinkId e : net_.in_links(v)) {
        if (mf_.at(e, s) > 0) in_pp += known_pp_[Idx(e, s)];
      }
      if (v == req.source) {
        r_in_[NodeIdx(v, s)] = std::min(out_r, out_pp);
        continue;
      }
      const double r_in = std::min({out_r, out_pp, in_pp});
      r_in_[NodeIdx(v, s)] = r_in;
      for (LinkId e : net_.in_links(v)) {
        if (mf_.at(e, s) <= 0) continue;
        set_r_[Idx(e, s)] = in_pp > 0.0 ? r_in * known_pp_[Idx(e, s)] / in_pp : 0.0;
      }
    }
  }

  for (size_t i = 0; i < cells; ++i) {
    if (arrived(delivery.backward, i)) {
      known_r_[i] = set_r_[i];
      r_silent_[i] = 0;
    } else if (++r_silent_[i] > config_.silent_periods) {
      known_r_[i] *= config_.decay;
    }
  }
  ++periods_;
}

}  // namespace vidmesh
