#ifndef VIDMESH_RADIO_H_
#define VIDMESH_RADIO_H_

#include <span>
#include <string>
#include <vector>

namespace vidmesh {

using NodeId = int;
using LinkId = int;
using StreamId = int;

struct Node {
  NodeId id = 0;
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

double Distance(const Node& a, const Node& b);

double DbToLinear(double db);
double LinearToDb(double linear);
double DbmToMw(double dbm);

// Physical-layer and framing parameters. Internally everything is linear;
// dB values only appear in scenario files.
struct RadioConfig {
  double tx_power_mw = 100.0;
  double noise_dbm = -100.0;
  double alpha = 4.1;
  // Gain constant applied to P / d^alpha. Defaults() calibrates it so the
  // MCS-0 range of the default table is kDefaultMcs0RangeM.
  double ref_gain = 1.0;
  double mu = 1.585;  // linear SINR margin (2 dB)
  int num_freq = 3;
  int num_slots = 200;
  double slot_duration_s = 0.005;
  double packet_payload_bits = 16384.0;  // 2 KiB
  double mac_efficiency = 1.0;
  // Bits in one "Mbit" of stream demand/throughput. 2^20 makes a 1 Mbps
  // stream generate 64 packets per second with the default payload.
  double stream_bits_per_mbit = 1048576.0;

  double NoiseMw() const;
  double PeriodSeconds() const { return num_slots * slot_duration_s; }
  // Stream rate conversions, in packets per period of num_slots slots.
  double MbpsToPacketsPerPeriod(double mbps) const;
  double PacketsPerPeriodToMbps(double packets) const;
  double PacketsPerSecondToMbps(double packets_per_s) const;

  // Throws InputError when an invariant is violated.
  void Validate() const;

  // Default parameters with ref_gain calibrated against McsTable::Default().
  static RadioConfig Defaults();
};

inline constexpr double kDefaultMcs0RangeM = 150.0;

struct McsEntry {
  int index = 0;
  double rate_mbps = 0.0;
  double beta = 1.0;  // linear SINR threshold
};

class McsTable {
 public:
  McsTable() = default;
  explicit McsTable(std::vector<McsEntry> entries);

  // 802.11g rates 6..54 Mbps. Thresholds are beta_0 = 3 dB plus the spread
  // of the 802.11g minimum receiver sensitivities (0,1,3,5,8,12,16,17 dB).
  static McsTable Default();

  const std::vector<McsEntry>& entries() const { return entries_; }
  const McsEntry& at(int m) const { return entries_.at(m); }
  int size() const { return static_cast<int>(entries_.size()); }
  double beta0() const { return entries_.front().beta; }

  void Validate() const;

 private:
  std::vector<McsEntry> entries_;
};

struct Link {
  LinkId id = 0;
  NodeId u = 0;  // sender
  NodeId v = 0;  // receiver
  int mcs = 0;
  double snr0 = 0.0;  // sinr(u, v, {})
  int pps = 1;        // packets per slot
  int cap = 0;        // packets per period, num_slots * pps
};

struct StreamRequest {
  StreamId index = 0;
  NodeId source = 0;
  NodeId dest = 0;
  double demand_mbps = 0.0;
};

// Received power at v from u, tx_power * ref_gain / d^alpha (mW). Throws
// InputError for coincident nodes.
double ReceivedPower(const Node& u, const Node& v, const RadioConfig& cfg);

// SINR of u's signal at v when the nodes in `interferers` transmit
// concurrently. u itself is skipped if present in the set.
double Sinr(std::span<const Node> nodes, NodeId u, NodeId v,
            std::span<const NodeId> interferers, const RadioConfig& cfg);

// Packets per slot for a PHY rate, floored and clamped to at least one.
// `clamped` is set when the clamp was applied.
int PacketsPerSlot(double rate_mbps, const RadioConfig& cfg,
                   bool* clamped = nullptr);

// All links (u, v, m) with snr0 >= beta_m, ordered by (u, v, m); ids are
// positions in the returned vector.
std::vector<Link> BuildLinks(std::span<const Node> nodes, const McsTable& mcs,
                             const RadioConfig& cfg);

// ref_gain that puts the beta0 threshold exactly at `range_m`.
double CalibrateRefGain(const RadioConfig& cfg, double beta0, double range_m);

// Largest distance at which snr0 >= beta.
double RangeForThreshold(const RadioConfig& cfg, double beta);

}  // namespace vidmesh

#endif  // VIDMESH_RADIO_H_
