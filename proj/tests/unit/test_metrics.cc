#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/metrics.h"

using namespace vidmesh;

namespace {

// Two streams over four 1 s windows with a 2 s warmup.
SimMetrics Synthetic() {
  SimMetrics m;
  m.slot_s = 0.005;
  m.period_slots = 200;
  m.window_s = 1.0;
  m.warmup_s = 2.0;
  m.slots = 800;
  m.streams.resize(2);
  const int64_t delivered[2][4] = {{10, 20, 60, 80}, {0, 0, 30, 50}};
  for (int s = 0; s < 2; ++s) {
    StreamStats& st = m.streams[s];
    st.windows.resize(4);
    for (int w = 0; w < 4; ++w) {
      st.windows[w].generated = 64;
      st.windows[w].delivered = delivered[s][w];
      st.delivered += delivered[s][w];
    }
    st.generated = 256;
  }
  m.streams[0].queue_dropped = 16;
  m.streams[0].windows[3].queue_dropped = 16;
  m.streams[0].hop_sum = 2 * m.streams[0].delivered;
  m.streams[1].hop_sum = 4 * m.streams[1].delivered;
  m.streams[0].delay_sum_s = 0.1 * m.streams[0].delivered;
  m.streams[1].delay_sum_s = 0.3 * m.streams[1].delivered;
  m.streams[0].delay_per_hop_sum_s = 0.05 * m.streams[0].delivered;
  m.streams[1].delay_per_hop_sum_s = 0.075 * m.streams[1].delivered;
  m.streams[0].delay_max_s = 0.4;
  m.streams[1].delay_max_s = 0.9;
  m.links.resize(3);
  m.links[0] = {100, 90, 10, 1};
  m.links[2] = {50, 50, 5, 0};
  m.in_flight = {0, 0};
  return m;
}

// Mbit counted as 2^20 bits, so 640 packets per second is 10 Mbps.
double Mbps(double packets_per_s) { return packets_per_s * 16384.0 / 1048576.0; }

}  // namespace

TEST_CASE("summary statistics from hand-computed windows") {
  const SimMetrics m = Synthetic();
  const Summary s = Summarize(m, RadioConfig::Defaults());
  REQUIRE(s.streams.size() == 2);
  // Only windows 2 and 3 count after the warmup.
  CHECK(s.streams[0].throughput_mbps == doctest::Approx(Mbps(70)));
  CHECK(s.streams[1].throughput_mbps == doctest::Approx(Mbps(40)));
  CHECK(s.streams[0].window_min_mbps == doctest::Approx(Mbps(60)));
  CHECK(s.streams[0].window_max_mbps == doctest::Approx(Mbps(80)));
  CHECK(s.thr_min_mbps == doctest::Approx(Mbps(40)));
  CHECK(s.thr_max_mbps == doctest::Approx(Mbps(70)));
  CHECK(s.thr_sum_mbps == doctest::Approx(Mbps(110)));
  CHECK(s.streams[0].drop_pct == doctest::Approx(100.0 * 16 / 256));
  CHECK(s.streams[0].worst_window_drop == doctest::Approx(0.25));
  CHECK(s.drops_max_pct == doctest::Approx(6.25));
  CHECK(s.streams[0].hops_avg == doctest::Approx(2.0));
  CHECK(s.hops_avg == doctest::Approx(3.0));
  CHECK(s.delay_max_s == doctest::Approx(0.9));
  // Packet-weighted: 170 packets at 0.1 s and 80 at 0.3 s.
  CHECK(s.delay_avg_s == doctest::Approx((170 * 0.1 + 80 * 0.3) / 250));
  CHECK(s.delay_per_hop_s == doctest::Approx((170 * 0.05 + 80 * 0.075) / 250));
  // Links with traffic only: PER 0.1 and 0.
  CHECK(s.per_avg == doctest::Approx(0.05));
}

TEST_CASE("a run shorter than the warmup averages every window") {
  SimMetrics m = Synthetic();
  m.warmup_s = 10.0;
  const Summary s = Summarize(m, RadioConfig::Defaults());
  CHECK(s.streams[0].throughput_mbps == doctest::Approx(Mbps(170 / 4.0)));
}

TEST_CASE("queue to R_in ratio skips the warmup and empty queues") {
  SimMetrics m = Synthetic();
  m.queues.push_back({0, 1, 0, 10.0, 0, 500, 10});  // ends at 1 s, in warmup
  m.queues.push_back({2, 1, 0, 10.0, 0, 15, 10});
  m.queues.push_back({3, 2, 1, 20.0, 0, 20, 20});
  m.queues.push_back({3, 4, 1, 0.0, 0, 0, 0});
  CHECK(MaxQueueToRin(m) == doctest::Approx(1.5));
  m.queues.push_back({3, 5, 1, 0.0, 3, 3, 0});
  CHECK(MaxQueueToRin(m) == std::numeric_limits<double>::infinity());
}

TEST_CASE("CSV writers emit their headers and one row per record") {
  const SimMetrics m = Synthetic();
  const Summary s = Summarize(m, RadioConfig::Defaults());
  auto lines = [](const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
  };
  std::ostringstream a, b, c;
  WriteStreamSeriesCsv(a, m, RadioConfig::Defaults());
  CHECK(a.str().rfind("window,stream,mbps,generated,delivered,dropped,delay_avg_s,delay_max_s\n",
                      0) == 0);
  CHECK(lines(a.str()) == 1 + 8);
  WriteQueueCsv(b, m);
  CHECK(b.str() == "period,node,stream,r_in,drops,queue_before,queue_after\n");
  WriteStreamSummaryCsv(c, s);
  CHECK(c.str().rfind("stream,throughput_mbps,delay_max_s,delay_avg_s,hops_avg,drop_pct\n", 0) ==
        0);
  CHECK(lines(c.str()) == 3);

  const Network net(testing::MakeScenario({{0, 0}, {100, 0}}, {{0, 1}}));
  SimMetrics lm = m;
  lm.links.assign(net.num_links(), {});
  lm.links[0] = {10, 9, 1, 0};
  std::ostringstream d;
  WriteLinkCsv(d, net, lm);
  CHECK(d.str().rfind("link,u,v,mcs,attempted,delivered,per\n", 0) == 0);
  CHECK(lines(d.str()) == 2);
}
