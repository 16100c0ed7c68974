#include "vidmesh/metrics.h"

#include <algorithm>
#include <limits>

#include "vidmesh/csv.h"

namespace vidmesh {

namespace {

double WindowMbps(const WindowStats& w, double window_s, const RadioConfig& radio) {
  return radio.PacketsPerSecondToMbps(static_cast<double>(w.delivered) / window_s);
}

// Windows that start at or after the warmup, or all of them when the run
// is too short to have any.
std::vector<int> SteadyWindows(const SimMetrics& m, int count) {
  std::vector<int> out;
  for (int w = 0; w < count; ++w) {
    if (w * m.window_s >= m.warmup_s - 1e-9) out.push_back(w);
  }
  if (out.empty()) {
    for (int w = 0; w < count; ++w) out.push_back(w);
  }
  return out;
}

}  // namespace

Summary Summarize(const SimMetrics& m, const RadioConfig& radio) {
  Summary sum;
  int64_t delivered = 0;
  double delay_total = 0.0, per_hop_total = 0.0;
  int hop_streams = 0;
  double hop_acc = 0.0;
  sum.thr_min_mbps = m.streams.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const StreamStats& st : m.streams) {
    StreamSummary ss;
    const auto steady = SteadyWindows(m, static_cast<int>(st.windows.size()));
    double acc = 0.0;
    ss.window_min_mbps = std::numeric_limits<double>::infinity();
    for (int w : steady) {
      const WindowStats& ws = st.windows[w];
      const double mbps = WindowMbps(ws, m.window_s, radio);
      acc += mbps;
      ss.window_min_mbps = std::min(ss.window_min_mbps, mbps);
      ss.window_max_mbps = std::max(ss.window_max_mbps, mbps);
      if (ws.generated > 0) {
        ss.worst_window_drop = std::max(
            ss.worst_window_drop,
            static_cast<double>(ws.queue_dropped) / static_cast<double>(ws.generated));
      }
    }
    if (steady.empty()) ss.window_min_mbps = 0.0;
    ss.throughput_mbps = steady.empty() ? 0.0 : acc / static_cast<double>(steady.size());
    ss.delay_max_s = st.delay_max_s;
    if (st.delivered > 0) {
      ss.delay_avg_s = st.delay_sum_s / static_cast<double>(st.delivered);
      ss.hops_avg = static_cast<double>(st.hop_sum) / static_cast<double>(st.delivered);
      hop_acc += ss.hops_avg;
      ++hop_streams;
    }
    if (st.generated > 0) {
      ss.drop_pct = 100.0 * static_cast<double>(st.queue_dropped) /
                    static_cast<double>(st.generated);
    }
    delivered += st.delivered;
    delay_total += st.delay_sum_s;
    per_hop_total += st.delay_per_hop_sum_s;

    sum.thr_min_mbps = std::min(sum.thr_min_mbps, ss.throughput_mbps);
    sum.thr_max_mbps = std::max(sum.thr_max_mbps, ss.throughput_mbps);
    sum.thr_sum_mbps += ss.throughput_mbps;
    sum.delay_max_s = std::max(sum.delay_max_s, ss.delay_max_s);
    sum.drops_max_pct = std::max(sum.drops_max_pct, ss.drop_pct);
    sum.streams.push_back(ss);
  }
  if (delivered > 0) {
    sum.delay_avg_s = delay_total / static_cast<double>(delivered);
    sum.delay_per_hop_s = per_hop_total / static_cast<double>(delivered);
  }
  if (hop_streams > 0) sum.hops_avg = hop_acc / hop_streams;

  int used = 0;
  double per = 0.0;
  for (const LinkStats& ls : m.links) {
    if (ls.attempted == 0) continue;
    per += 1.0 - static_cast<double>(ls.delivered) / static_cast<double>(ls.attempted);
    ++used;
  }
  if (used > 0) sum.per_avg = per / used;
  sum.sinr_failures = m.sinr_failures;
  return sum;
}

double MaxQueueToRin(const SimMetrics& m) {
  double worst = 0.0;
  for (const QueueSample& q : m.queues) {
    const double t = (q.period + 1) * m.period_slots * m.slot_s;
    if (t <= m.warmup_s + 1e-9) continue;
    if (q.queue_before == 0) continue;
    if (q.r_in <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, static_cast<double>(q.queue_before) / q.r_in);
  }
  return worst;
}

void WriteStreamSeriesCsv(std::ostream& out, const SimMetrics& m, const RadioConfig& radio) {
  out << "window,stream,mbps,generated,delivered,dropped,delay_avg_s,delay_max_s\n";
  for (size_t s = 0; s < m.streams.size(); ++s) {
    const auto& ws = m.streams[s].windows;
    for (size_t w = 0; w < ws.size(); ++w) {
      const double avg = ws[w].delivered > 0
                             ? ws[w].delay_sum_s / static_cast<double>(ws[w].delivered)
                             : 0.0;
      CsvRow(out, w, s, Num(WindowMbps(ws[w], m.window_s, radio)), ws[w].generated,
             ws[w].delivered, ws[w].queue_dropped, Num(avg), Num(ws[w].delay_max_s));
    }
  }
}

void WriteQueueCsv(std::ostream& out, const SimMetrics& m) {
  out << "period,node,stream,r_in,drops,queue_before,queue_after\n";
  for (const QueueSample& q : m.queues) {
    CsvRow(out, q.period, q.node, q.stream, Num(q.r_in), q.drops, q.queue_before,
           q.queue_after);
  }
}

void WriteLinkCsv(std::ostream& out, const Network& net, const SimMetrics& m) {
  out << "link,u,v,mcs,attempted,delivered,per\n";
  for (size_t e = 0; e < m.links.size(); ++e) {
    const LinkStats& ls = m.links[e];
    if (ls.attempted == 0) continue;
    const Link& l = net.link(static_cast<LinkId>(e));
    const double per =
        1.0 - static_cast<double>(ls.delivered) / static_cast<double>(ls.attempted);
    CsvRow(out, e, l.u, l.v, l.mcs, ls.attempted, ls.delivered, Num(per));
  }
}

void WriteStreamSummaryCsv(std::ostream& out, const Summary& s) {
  out << "stream,throughput_mbps,delay_max_s,delay_avg_s,hops_avg,drop_pct\n";
  for (size_t i = 0; i < s.streams.size(); ++i) {
    const StreamSummary& ss = s.streams[i];
    CsvRow(out, i, Num(ss.throughput_mbps), Num(ss.delay_max_s), Num(ss.delay_avg_s),
           Num(ss.hops_avg), Num(ss.drop_pct));
  }
}

}  // namespace vidmesh
