#include "vidmesh/simulator.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <random>

#include "vidmesh/error.h"

namespace vidmesh {

void SimConfig::Validate(int period_slots, double slot_s) const {
  if (!(duration_s > 0.0)) throw InputError("duration must be positive");
  const double periods = duration_s / (period_slots * slot_s);
  if (std::abs(periods - std::round(periods)) > 1e-6 || std::round(periods) < 1) {
    throw InputError("duration must be a whole number of periods");
  }
  if (per < 0.0 || per > 0.1) throw InputError("per must lie in [0, 0.1]");
  if (!(window_s > 0.0)) throw InputError("window must be positive");
  if (warmup_s < 0.0) throw InputError("warmup must be nonnegative");
  if (fc_message_loss < 0.0 || fc_message_loss > 1.0) {
    throw InputError("message loss must lie in [0, 1]");
  }
  if (backoff_max < 0) throw InputError("backoff must be nonnegative");
}

std::vector<Verdict> AdjudicateSlot(const Network& net,
                                    std::span<const Transmission> active) {
  std::vector<Verdict> out(active.size());
  std::vector<NodeId> senders, endpoints;
  for (size_t a = 0; a < active.size(); ++a) {
    const Link& l = net.link(active[a].link);
    senders.clear();
    endpoints.clear();
    for (size_t b = 0; b < active.size(); ++b) {
      if (b == a || active[b].freq != active[a].freq) continue;
      const Link& o = net.link(active[b].link);
      senders.push_back(o.u);
      endpoints.push_back(o.u);
      endpoints.push_back(o.v);
    }
    out[a].forward = net.Sinr(l.u, l.v, senders) >= net.mcs().at(l.mcs).beta;
    out[a].reverse = net.Sinr(l.v, l.u, endpoints) >= net.mcs().beta0();
  }
  return out;
}

namespace {

struct Packet {
  int64_t created = 0;  // slot
  int hops = 0;
};

// Queues, sources, flow control and bookkeeping shared by both modes.
// Lanes split a node's per-stream queue: one lane per stream in scheduled
// mode, one per route otherwise.
class Engine {
 public:
  Engine(const Network& net, const MfTable& mf, const SimConfig& cfg,
         int period_slots, std::vector<StreamId> lane_stream,
         std::vector<double> lane_weight)
      : net_(net),
        mf_(mf),
        cfg_(cfg),
        period_(period_slots),
        k_(net.num_streams()),
        lanes_(static_cast<int>(lane_stream.size())),
        lane_stream_(std::move(lane_stream)),
        lane_weight_(std::move(lane_weight)),
        rng_(cfg.seed) {
    const RadioConfig& radio = net.radio();
    cfg.Validate(period_slots, radio.slot_duration_s);
    queues_.resize(static_cast<size_t>(net.num_nodes()) * lanes_);
    qsize_.assign(static_cast<size_t>(net.num_nodes()) * k_, 0);
    const size_t cells = static_cast<size_t>(net.num_links()) * k_;
    budget_.assign(cells, 0.0);
    sent_.assign(cells, 0);
    credit_.assign(cells, 0.0);
    for (LinkId e = 0; e < net.num_links(); ++e) {
      for (int s = 0; s < k_; ++s) budget_[Idx(e, s)] = mf.at(e, s);
    }
    if (cfg.flow_control) fc_ = std::make_unique<FlowControl>(net, mf, cfg.fc);

    gen_acc_.assign(k_, 0.0);
    swrr_.assign(lanes_, 0.0);
    demand_.resize(k_);
    for (int s = 0; s < k_; ++s) {
      demand_[s] = net.DemandPackets(s) * period_ / radio.num_slots;
    }

    m_.slot_s = radio.slot_duration_s;
    m_.period_slots = period_;
    m_.window_s = cfg.window_s;
    m_.warmup_s = cfg.warmup_s;
    m_.slots = std::llround(cfg.duration_s / radio.slot_duration_s);
    num_windows_ = std::max(1, static_cast<int>(std::ceil(cfg.duration_s / cfg.window_s - 1e-9)));
    m_.streams.resize(k_);
    for (auto& st : m_.streams) st.windows.resize(num_windows_);
    m_.links.resize(net.num_links());
  }

  size_t Idx(LinkId e, StreamId s) const { return static_cast<size_t>(e) * k_ + s; }
  std::deque<Packet>& queue(NodeId v, int lane) {
    return queues_[static_cast<size_t>(v) * lanes_ + lane];
  }
  int64_t qsize(NodeId v, StreamId s) const { return qsize_[static_cast<size_t>(v) * k_ + s]; }
  double budget(LinkId e, StreamId s) const { return budget_[Idx(e, s)]; }
  int sent(LinkId e, StreamId s) const { return sent_[Idx(e, s)]; }
  void Credit(LinkId e, StreamId s, double packets) { credit_[Idx(e, s)] += packets; }
  std::mt19937_64& rng() { return rng_; }
  int Window(int64_t slot) const {
    const int w = static_cast<int>(slot * m_.slot_s / cfg_.window_s + 1e-9);
    return std::min(w, num_windows_ - 1);
  }

  // Sources release packets evenly across the period.
  void Generate(int64_t slot) {
    for (int s = 0; s < k_; ++s) {
      const double rate = fc_ ? std::min(fc_->encoder_rate(s), demand_[s]) : demand_[s];
      gen_acc_[s] += rate / period_;
      const auto n = static_cast<int64_t>(std::floor(gen_acc_[s] + 1e-9));
      if (n <= 0) continue;
      gen_acc_[s] -= static_cast<double>(n);
      const NodeId src = net_.streams()[s].source;
      for (int64_t x = 0; x < n; ++x) {
        const int lane = SourceLane(s);
        if (lane < 0) break;
        queue(src, lane).push_back({slot, 0});
        ++qsize_[static_cast<size_t>(src) * k_ + s];
        ++m_.streams[s].generated;
        ++m_.streams[s].windows[Window(slot)].generated;
      }
    }
  }

  // Takes up to n head packets of a lane at u for link e.
  std::vector<Packet> Take(NodeId u, int lane, LinkId e, int n) {
    const StreamId s = lane_stream_[lane];
    auto& q = queue(u, lane);
    std::vector<Packet> out;
    while (n-- > 0 && !q.empty()) {
      out.push_back(q.front());
      q.pop_front();
    }
    qsize_[static_cast<size_t>(u) * k_ + s] -= static_cast<int64_t>(out.size());
    sent_[Idx(e, s)] += static_cast<int>(out.size());
    budget_[Idx(e, s)] -= static_cast<double>(out.size());
    return out;
  }

  // Records the outcome of one transmission. Packets that get through are
  // staged for the receiver's queue (or delivered at the sink).
  void Land(int64_t slot, LinkId e, int lane, std::vector<Packet>& pkts, bool ok) {
    const Link& l = net_.link(e);
    const StreamId s = lane_stream_[lane];
    LinkStats& ls = m_.links[e];
    ++ls.transmissions;
    ++m_.transmissions;
    ls.attempted += static_cast<int64_t>(pkts.size());
    if (!ok) {
      ++ls.failures;
      ++m_.sinr_failures;
      m_.streams[s].sinr_lost += static_cast<int64_t>(pkts.size());
      return;
    }
    std::bernoulli_distribution lost(cfg_.per);
    for (Packet& p : pkts) {
      if (cfg_.adjudication == Adjudication::kStochastic && cfg_.per > 0.0 && lost(rng_)) {
        ++m_.streams[s].per_lost;
        continue;
      }
      ++ls.delivered;
      ++p.hops;
      if (l.v == net_.streams()[s].dest) {
        Deliver(slot, s, p);
      } else {
        staged_.push_back({l.v, lane, p});
      }
    }
  }

  void CountReverseFailure() { ++m_.reverse_failures; }

  void FlushStaged() {
    for (const Staged& st : staged_) {
      queue(st.node, st.lane).push_back(st.packet);
      ++qsize_[static_cast<size_t>(st.node) * k_ + lane_stream_[st.lane]];
    }
    staged_.clear();
  }

  // Period boundary: flow control, drops and fresh budgets.
  void EndPeriod(int64_t slot, int period_index) {
    const size_t cells = static_cast<size_t>(net_.num_links()) * k_;
    if (fc_) {
      std::vector<double> p_plus(cells, 0.0);
      for (size_t i = 0; i < cells; ++i) {
        const double cap = mf_.at(static_cast<LinkId>(i / k_), static_cast<int>(i % k_));
        if (cap <= 0) continue;
        p_plus[i] = std::max<double>(sent_[i], std::min(credit_[i], cap));
      }
      FcDelivery delivery;
      if (cfg_.fc_message_loss > 0.0) {
        std::bernoulli_distribution arrive(1.0 - cfg_.fc_message_loss);
        delivery.forward.resize(cells);
        delivery.backward.resize(cells);
        for (size_t i = 0; i < cells; ++i) {
          delivery.forward[i] = arrive(rng_);
          delivery.backward[i] = arrive(rng_);
        }
      }
      fc_->Step(p_plus, delivery);

      for (int s = 0; s < k_; ++s) {
        for (NodeId v = 0; v < net_.num_nodes(); ++v) {
          if (!fc_->participates(v, s) || v == net_.streams()[s].dest) continue;
          QueueSample q;
          q.period = period_index;
          q.node = v;
          q.stream = s;
          q.r_in = fc_->r_in(v, s);
          q.queue_before = qsize(v, s);
          q.drops = DropOldest(v, s, q.r_in);
          q.queue_after = qsize(v, s);
          m_.streams[s].queue_dropped += q.drops;
          m_.streams[s].windows[Window(slot)].queue_dropped += q.drops;
          m_.queues.push_back(q);
        }
      }
    }
    for (size_t i = 0; i < cells; ++i) {
      const double mf = mf_.at(static_cast<LinkId>(i / k_), static_cast<int>(i % k_));
      if (mf <= 0) continue;
      const double allow =
          fc_ ? std::min(mf, fc_->request(static_cast<LinkId>(i / k_), static_cast<int>(i % k_)))
              : mf;
      const double left = std::max(0.0, budget_[i]);
      budget_[i] = allow + (left - std::floor(left));
      sent_[i] = 0;
      credit_[i] = 0.0;
    }
  }

  SimMetrics Finish() {
    m_.in_flight.assign(k_, 0);
    for (NodeId v = 0; v < net_.num_nodes(); ++v) {
      for (int s = 0; s < k_; ++s) m_.in_flight[s] += qsize(v, s);
    }
    return std::move(m_);
  }

  int period() const { return period_; }
  int lanes() const { return lanes_; }
  StreamId lane_stream(int lane) const { return lane_stream_[lane]; }
  const MfTable& mf() const { return mf_; }

 private:
  struct Staged {
    NodeId node;
    int lane;
    Packet packet;
  };

  void Deliver(int64_t slot, StreamId s, const Packet& p) {
    StreamStats& st = m_.streams[s];
    const double delay = static_cast<double>(slot - p.created + 1) * m_.slot_s;
    ++st.delivered;
    st.hop_sum += p.hops;
    st.delay_sum_s += delay;
    st.delay_max_s = std::max(st.delay_max_s, delay);
    st.delay_per_hop_sum_s += delay / std::max(1, p.hops);
    WindowStats& w = st.windows[Window(slot)];
    ++w.delivered;
    w.delay_sum_s += delay;
    w.delay_max_s = std::max(w.delay_max_s, delay);
  }

  // Smooth weighted round robin over the stream's lanes.
  int SourceLane(StreamId s) {
    int best = -1;
    double total = 0.0;
    for (int lane = 0; lane < lanes_; ++lane) {
      if (lane_stream_[lane] != s || lane_weight_[lane] <= 0.0) continue;
      swrr_[lane] += lane_weight_[lane];
      total += lane_weight_[lane];
      if (best < 0 || swrr_[lane] > swrr_[best]) best = lane;
    }
    if (best >= 0) swrr_[best] -= total;
    return best;
  }

  int64_t DropOldest(NodeId v, StreamId s, double limit) {
    int64_t dropped = 0;
    while (static_cast<double>(qsize(v, s)) > limit + 1e-9) {
      int oldest = -1;
      for (int lane = 0; lane < lanes_; ++lane) {
        if (lane_stream_[lane] != s) continue;
        const auto& q = queue(v, lane);
        if (q.empty()) continue;
        if (oldest < 0 || q.front().created < queue(v, oldest).front().created) oldest = lane;
      }
      if (oldest < 0) break;
      queue(v, oldest).pop_front();
      --qsize_[static_cast<size_t>(v) * k_ + s];
      ++dropped;
    }
    return dropped;
  }

  const Network& net_;
  MfTable mf_;
  SimConfig cfg_;
  int period_;
  int k_;
  int lanes_;
  std::vector<StreamId> lane_stream_;
  std::vector<double> lane_weight_;
  std::mt19937_64 rng_;
  std::unique_ptr<FlowControl> fc_;
  std::vector<std::deque<Packet>> queues_;
  std::vector<int64_t> qsize_;
  std::vector<double> budget_;
  std::vector<int> sent_;
  std::vector<double> credit_;
  std::vector<double> gen_acc_;
  std::vector<double> swrr_;
  std::vector<double> demand_;
  std::vector<Staged> staged_;
  int num_windows_ = 1;
  SimMetrics m_;
};

struct Pending {
  LinkId link;
  int freq;
  int lane;
  std::vector<Packet> packets;
};

void Resolve(const Network& net, Engine& eng, int64_t slot, std::vector<Pending>& txs) {
  std::vector<Transmission> active;
  active.reserve(txs.size());
  for (const Pending& p : txs) active.push_back({p.link, p.freq});
  const std::vector<Verdict> verdicts = AdjudicateSlot(net, active);
  for (size_t x = 0; x < txs.size(); ++x) {
    if (verdicts[x].forward && !verdicts[x].reverse) eng.CountReverseFailure();
    eng.Land(slot, txs[x].link, txs[x].lane, txs[x].packets, verdicts[x].ok());
  }
  eng.FlushStaged();
}

}  // namespace

SimMetrics RunScheduled(const Network& net, const ScheduleTable& table,
                        const MfTable& mf, const SimConfig& config) {
  if (config.radios_per_node != 1) {
    throw InputError("scheduled runs use one radio per node");
  }
  const int k = net.num_streams();
  std::vector<StreamId> lane_stream(k);
  for (int s = 0; s < k; ++s) lane_stream[s] = s;
  Engine eng(net, mf, config, table.num_slots(), lane_stream, std::vector<double>(k, 1.0));
  const int P = eng.period();
  const int64_t slots = std::llround(config.duration_s / net.radio().slot_duration_s);

  std::vector<Pending> txs;
  for (int64_t g = 0; g < slots; ++g) {
    const int tau = static_cast<int>(g % P);
    eng.Generate(g);
    txs.clear();
    for (int j = 0; j < table.num_freq(); ++j) {
      for (LinkId e : table.cell(j, tau)) {
        const Link& l = net.link(e);
        // Lowest sent/required ratio among streams that can send now.
        int pick = -1;
        double best = 0.0;
        for (int s = 0; s < k; ++s) {
          const int need = mf.at(e, s);
          if (need <= 0 || eng.qsize(l.u, s) == 0 || eng.budget(e, s) < 1.0 - 1e-9) continue;
          const double ratio = static_cast<double>(eng.sent(e, s)) / need;
          if (pick < 0 || ratio < best) {
            pick = s;
            best = ratio;
          }
        }
        // P+ counts what each stream could have sent in this slot.
        for (int s = 0; s < k; ++s) {
          if (mf.at(e, s) <= 0) continue;
          const bool blocked = eng.qsize(l.u, s) == 0 || eng.budget(e, s) < 1.0 - 1e-9;
          if (s == pick || blocked) eng.Credit(e, s, l.pps);
        }
        if (pick < 0) continue;
        const int n = std::min<int>(l.pps, static_cast<int>(std::floor(eng.budget(e, pick) + 1e-9)));
        txs.push_back({e, j, pick, eng.Take(l.u, pick, e, n)});
      }
    }
    Resolve(net, eng, g, txs);
    if ((g + 1) % P == 0) eng.EndPeriod(g, static_cast<int>(g / P));
  }
  return eng.Finish();
}

SimMetrics RunUnscheduled(const Network& net, const ConflictGraph& graph,
                          const std::vector<Route>& routes, const SimConfig& config) {
  const int F = net.radio().num_freq;
  const int radios = config.radios_per_node;
  if (radios != 1 && radios != F) {
    throw InputError("radios per node must be 1 or the channel count");
  }
  const int n = net.num_nodes();
  const int L = static_cast<int>(routes.size());
  std::vector<StreamId> lane_stream(L);
  std::vector<double> lane_weight(L);
  // hop_link[lane * n + node]: the route's link out of node, or -1.
  std::vector<LinkId> hop_link(static_cast<size_t>(L) * n, -1);
  for (int r = 0; r < L; ++r) {
    const Route& rt = routes[r];
    if (rt.freq < 0 || rt.freq >= F) throw InputError("route channel out of range");
    lane_stream[r] = rt.stream;
    lane_weight[r] = rt.weight;
    for (LinkId e : rt.links) hop_link[static_cast<size_t>(r) * n + net.link(e).u] = e;
  }
  const MfTable mf = RoutesToMf(net, routes);
  Engine eng(net, mf, config, net.radio().num_slots, lane_stream, lane_weight);
  const int P = eng.period();
  const int64_t slots = std::llround(config.duration_s / net.radio().slot_duration_s);

  // Lanes each radio serves, in round-robin order.
  std::vector<std::vector<int>> radio_lanes(static_cast<size_t>(n) * radios);
  for (int r = 0; r < L; ++r) {
    for (LinkId e : routes[r].links) {
      const int radio = radios == 1 ? 0 : routes[r].freq;
      radio_lanes[static_cast<size_t>(net.link(e).u) * radios + radio].push_back(r);
    }
  }
  std::vector<size_t> rr(radio_lanes.size(), 0);
  std::vector<int> backoff(radio_lanes.size(), 0);
  std::uniform_int_distribution<int> draw_backoff(0, config.backoff_max);

  struct Candidate {
    NodeId u;
    int lane;
  };
  std::vector<Candidate> cands;
  std::vector<Pending> txs;
  std::vector<std::vector<LinkId>> on_air(F);
  std::vector<uint8_t> radio_busy(static_cast<size_t>(n) * radios);
  std::vector<uint8_t> sending(static_cast<size_t>(L) * n);

  auto radio_of = [&](int lane) { return radios == 1 ? 0 : routes[lane].freq; };
  auto clear_for = [&](LinkId e, int lane) {
    const Link& l = net.link(e);
    const int rad = radio_of(lane);
    if (radio_busy[static_cast<size_t>(l.u) * radios + rad] ||
        radio_busy[static_cast<size_t>(l.v) * radios + rad]) {
      return false;
    }
    for (LinkId o : on_air[routes[lane].freq]) {
      if (graph.Conflicts(e, o)) return false;
    }
    return true;
  };

  for (int64_t g = 0; g < slots; ++g) {
    eng.Generate(g);
    cands.clear();
    for (NodeId u = 0; u < n; ++u) {
      for (int rad = 0; rad < radios; ++rad) {
        const size_t key = static_cast<size_t>(u) * radios + rad;
        if (backoff[key] > 0) {
          --backoff[key];
          continue;
        }
        const auto& lanes = radio_lanes[key];
        for (size_t x = 0; x < lanes.size(); ++x) {
          const int lane = lanes[(rr[key] + x) % lanes.size()];
          const LinkId e = hop_link[static_cast<size_t>(lane) * n + u];
          const StreamId s = lane_stream[lane];
          if (eng.queue(u, lane).empty() || eng.budget(e, s) < 1.0 - 1e-9) continue;
          rr[key] = (rr[key] + x + 1) % lanes.size();
          cands.push_back({u, lane});
          break;
        }
      }
    }
    std::shuffle(cands.begin(), cands.end(), eng.rng());

    for (auto& a : on_air) a.clear();
    std::fill(radio_busy.begin(), radio_busy.end(), 0);
    std::fill(sending.begin(), sending.end(), 0);
    txs.clear();
    for (const Candidate& c : cands) {
      const LinkId e = hop_link[static_cast<size_t>(c.lane) * n + c.u];
      const Link& l = net.link(e);
      const int rad = radio_of(c.lane);
      if (!clear_for(e, c.lane)) {
        backoff[static_cast<size_t>(c.u) * radios + rad] = draw_backoff(eng.rng());
        continue;
      }
      const int j = routes[c.lane].freq;
      on_air[j].push_back(e);
      radio_busy[static_cast<size_t>(l.u) * radios + rad] = 1;
      radio_busy[static_cast<size_t>(l.v) * radios + rad] = 1;
      sending[static_cast<size_t>(c.lane) * n + c.u] = 1;
      const int cnt = std::min<int>(
          l.pps, static_cast<int>(std::floor(eng.budget(e, lane_stream[c.lane]) + 1e-9)));
      txs.push_back({e, j, c.lane, eng.Take(c.u, c.lane, e, cnt)});
    }

    // Idle but clear opportunities count towards P+.
    for (int lane = 0; lane < L; ++lane) {
      const StreamId s = lane_stream[lane];
      for (LinkId e : routes[lane].links) {
        const NodeId u = net.link(e).u;
        if (sending[static_cast<size_t>(lane) * n + u]) {
          eng.Credit(e, s, net.link(e).pps);
          continue;
        }
        const bool idle = eng.queue(u, lane).empty() || eng.budget(e, s) < 1.0 - 1e-9;
        if (idle && clear_for(e, lane)) eng.Credit(e, s, net.link(e).pps);
      }
    }

    Resolve(net, eng, g, txs);
    if ((g + 1) % P == 0) eng.EndPeriod(g, static_cast<int>(g / P));
  }
  return eng.Finish();
}

}  // namespace vidmesh
