#ifndef VIDMESH_METRICS_H_
#define VIDMESH_METRICS_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "vidmesh/network.h"

namespace vidmesh {

struct WindowStats {
  int64_t generated = 0;
  int64_t delivered = 0;
  int64_t queue_dropped = 0;
  double delay_sum_s = 0.0;
  double delay_max_s = 0.0;
};

struct StreamStats {
  int64_t generated = 0;
  int64_t delivered = 0;
  int64_t queue_dropped = 0;
  int64_t sinr_lost = 0;
  int64_t per_lost = 0;
  int64_t hop_sum = 0;  // over delivered packets
  double delay_sum_s = 0.0;
  double delay_max_s = 0.0;
  double delay_per_hop_sum_s = 0.0;
  std::vector<WindowStats> windows;
};

struct LinkStats {
  int64_t attempted = 0;  // packets put on the air
  int64_t delivered = 0;  // packets received
  int64_t transmissions = 0;
  int64_t failures = 0;   // transmissions lost to SINR
};

// One row per (period, node, stream) for nodes taking part in the stream.
struct QueueSample {
  int period = 0;
  NodeId node = 0;
  StreamId stream = 0;
  double r_in = 0.0;
  int64_t drops = 0;
  int64_t queue_before = 0;  // |Q| at the boundary, before dropping
  int64_t queue_after = 0;
};

struct SimMetrics {
  double slot_s = 0.0;
  int period_slots = 0;
  double window_s = 1.0;
  double warmup_s = 0.0;
  int64_t slots = 0;
  std::vector<StreamStats> streams;
  std::vector<LinkStats> links;
  std::vector<QueueSample> queues;
  int64_t transmissions = 0;
  int64_t sinr_failures = 0;   // transmissions failing forward or reverse
  int64_t reverse_failures = 0;
  std::vector<int64_t> in_flight;  // per stream, queued at the end
};

struct StreamSummary {
  double throughput_mbps = 0.0;  // mean over windows after warmup
  double window_min_mbps = 0.0;
  double window_max_mbps = 0.0;
  double delay_max_s = 0.0;
  double delay_avg_s = 0.0;
  double hops_avg = 0.0;
  double drop_pct = 0.0;          // queue drops / generated
  double worst_window_drop = 0.0; // after warmup, fraction
};

// Columns of the comparison tables: throughput min/sum/max, delay, delay by
// hops, hops, drops and PER.
struct Summary {
  double thr_min_mbps = 0.0;
  double thr_sum_mbps = 0.0;
  double thr_max_mbps = 0.0;
  double delay_max_s = 0.0;
  double delay_avg_s = 0.0;
  double delay_per_hop_s = 0.0;
  double hops_avg = 0.0;
  double drops_max_pct = 0.0;
  double per_avg = 0.0;
  int64_t sinr_failures = 0;
  std::vector<StreamSummary> streams;
};

Summary Summarize(const SimMetrics& m, const RadioConfig& radio);

// Worst ratio |Q| / R_in over boundaries after warmup (pre-drop queues).
double MaxQueueToRin(const SimMetrics& m);

// window,stream,mbps,generated,delivered,dropped,delay_avg_s,delay_max_s
void WriteStreamSeriesCsv(std::ostream& out, const SimMetrics& m,
                          const RadioConfig& radio);
// period,node,stream,r_in,drops,queue_before,queue_after
void WriteQueueCsv(std::ostream& out, const SimMetrics& m);
// link,u,v,mcs,attempted,delivered,per
void WriteLinkCsv(std::ostream& out, const Network& net, const SimMetrics& m);
// stream,throughput_mbps,delay_max_s,delay_avg_s,hops_avg,drop_pct
void WriteStreamSummaryCsv(std::ostream& out, const Summary& s);

}  // namespace vidmesh

#endif  // VIDMESH_METRICS_H_
