#ifndef VIDMESH_SIMULATOR_H_
#define VIDMESH_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "vidmesh/flow.h"
#include "vidmesh/flow_control.h"
#include "vidmesh/interference.h"
#include "vidmesh/metrics.h"
#include "vidmesh/network.h"
#include "vidmesh/routing.h"
#include "vidmesh/schedule.h"

namespace vidmesh {

enum class Adjudication { kDeterministic, kStochastic };

struct SimConfig {
  double duration_s = 25.0;
  uint64_t seed = 1;
  Adjudication adjudication = Adjudication::kDeterministic;
  double per = 0.0;  // extra loss per surviving packet, stochastic mode
  int radios_per_node = 1;
  double window_s = 1.0;
  double warmup_s = 2.0;
  bool flow_control = true;
  double fc_message_loss = 0.0;
  FcConfig fc;
  int backoff_max = 3;  // unscheduled deferral, mini-slots

  // Throws InputError unless the duration is a whole number of periods
  // and per lies in [0, 0.1].
  void Validate(int period_slots, double slot_s) const;
};

struct Transmission {
  LinkId link = 0;
  int freq = 0;
};

struct Verdict {
  bool forward = false;  // sinr(u, v, S) >= beta_m
  bool reverse = false;  // sinr(v, u, S + receivers) >= beta_0
  bool ok() const { return forward && reverse; }
};

// Per-slot SINR test for concurrent transmissions. S holds the senders of
// the other links on the same channel; the reverse check adds their
// receivers. Channels do not interfere with each other.
std::vector<Verdict> AdjudicateSlot(const Network& net,
                                    std::span<const Transmission> active);

// Runs a periodic plan (table A and mf) with one radio per node. The
// period is the table's slot count.
SimMetrics RunScheduled(const Network& net, const ScheduleTable& table,
                        const MfTable& mf, const SimConfig& config);

// Runs routed streams without a table: each node has `radios_per_node`
// radios (one per channel when equal to the channel count), mini-slots of
// one slot, and a carrier-sense approximation that defers a sender when a
// conflicting link is already active on its channel.
SimMetrics RunUnscheduled(const Network& net, const ConflictGraph& graph,
                          const std::vector<Route>& routes,
                          const SimConfig& config);

}  // namespace vidmesh

#endif  // VIDMESH_SIMULATOR_H_
