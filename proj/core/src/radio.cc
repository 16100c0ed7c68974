#include "vidmesh/radio.h"

#include <cmath>
#include <iostream>
#include <sstream>

#include "vidmesh/error.h"

namespace vidmesh {

double Distance(const Node& a, const Node& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double DbToLinear(double db) { return std::pow(10.0, db / 10.0); }
double LinearToDb(double linear) { return 10.0 * std::log10(linear); }
double DbmToMw(double dbm) { return DbToLinear(dbm); }

double RadioConfig::NoiseMw() const { return DbmToMw(noise_dbm); }

double RadioConfig::MbpsToPacketsPerPeriod(double mbps) const {
  return mbps * stream_bits_per_mbit / packet_payload_bits * PeriodSeconds();
}

double RadioConfig::PacketsPerPeriodToMbps(double packets) const {
  return PacketsPerSecondToMbps(packets / PeriodSeconds());
}

double RadioConfig::PacketsPerSecondToMbps(double packets_per_s) const {
  return packets_per_s * packet_payload_bits / stream_bits_per_mbit;
}

void RadioConfig::Validate() const {
  std::ostringstream err;
  if (!(tx_power_mw > 0)) err << "tx_power must be > 0; ";
  if (!(alpha > 0)) err << "alpha must be > 0; ";
  if (!(ref_gain > 0)) err << "ref_gain must be > 0; ";
  if (!(mu >= 1)) err << "mu must be >= 1; ";
  if (num_freq < 1) err << "num_freq must be >= 1; ";
  if (num_slots < 1) err << "num_slots must be >= 1; ";
  if (!(slot_duration_s > 0)) err << "slot_duration must be > 0; ";
  if (!(packet_payload_bits > 0)) err << "packet_payload must be > 0; ";
  if (!(mac_efficiency > 0 && mac_efficiency <= 1))
    err << "mac_efficiency must lie in (0,1]; ";
  if (!(stream_bits_per_mbit > 0)) err << "stream_bits_per_mbit must be > 0; ";
  if (!std::isfinite(noise_dbm)) err << "noise must be finite; ";
  if (!err.str().empty()) throw InputError("radio config: " + err.str());
}

RadioConfig RadioConfig::Defaults() {
  RadioConfig cfg;
  cfg.ref_gain =
      CalibrateRefGain(cfg, McsTable::Default().beta0(), kDefaultMcs0RangeM);
  return cfg;
}

McsTable::McsTable(std::vector<McsEntry> entries)
    : entries_(std::move(entries)) {
  Validate();
}

McsTable McsTable::Default() {
  static constexpr double kRates[] = {6, 9, 12, 18, 24, 36, 48, 54};
  static constexpr double kBetaDb[] = {3, 4, 6, 8, 11, 15, 19, 20};
  std::vector<McsEntry> entries;
  for (int m = 0; m < 8; ++m) {
    entries.push_back({m, kRates[m], DbToLinear(kBetaDb[m])});
  }
  return McsTable(std::move(entries));
}

void McsTable::Validate() const {
  if (entries_.empty()) throw InputError("mcs table is empty");
  for (size_t m = 0; m < entries_.size(); ++m) {
    const McsEntry& e = entries_[m];
    if (e.index != static_cast<int>(m))
      throw InputError("mcs indices must be dense and ordered from 0");
    if (!(e.rate_mbps > 0) || !(e.beta > 0))
      throw InputError("mcs rate and beta must be positive");
    if (m > 0) {
      if (!(e.rate_mbps > entries_[m - 1].rate_mbps))
        throw InputError("mcs rates must be strictly increasing");
      if (e.beta < entries_[m - 1].beta)
        throw InputError("mcs thresholds must be nondecreasing");
    }
  }
}

double ReceivedPower(const Node& u, const Node& v, const RadioConfig& cfg) {
  const double d = Distance(u, v);
  if (!(d > 0)) {
    std::ostringstream msg;
    msg << "coincident nodes " << u.id << " and " << v.id;
    throw InputError(msg.str());
  }
  return cfg.tx_power_mw * cfg.ref_gain / std::pow(d, cfg.alpha);
}

double Sinr(std::span<const Node> nodes, NodeId u, NodeId v,
            std::span<const NodeId> interferers, const RadioConfig& cfg) {
  double interference = 0.0;
  for (NodeId x : interferers) {
    if (x == u) continue;
    interference += ReceivedPower(nodes[x], nodes[v], cfg);
  }
  return ReceivedPower(nodes[u], nodes[v], cfg) /
         (cfg.NoiseMw() + interference);
}

int PacketsPerSlot(double rate_mbps, const RadioConfig& cfg, bool* clamped) {
  const double bits =
      rate_mbps * 1e6 * cfg.slot_duration_s * cfg.mac_efficiency;
  // Guard against 16384/16384 landing a hair below one.
  int pps = static_cast<int>(std::floor(bits / cfg.packet_payload_bits + 1e-9));
  if (clamped) *clamped = false;
  if (pps < 1) {
    std::cerr << "warning: rate " << rate_mbps
              << " Mbps carries less than one packet per slot; using 1\n";
    if (clamped) *clamped = true;
    pps = 1;
  }
  return pps;
}

std::vector<Link> BuildLinks(std::span<const Node> nodes, const McsTable& mcs,
                             const RadioConfig& cfg) {
  std::vector<int> pps_by_mcs;
  for (const McsEntry& e : mcs.entries()) {
    pps_by_mcs.push_back(PacketsPerSlot(e.rate_mbps, cfg));
  }
  std::vector<Link> links;
  const NodeId n = static_cast<NodeId>(nodes.size());
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      const double snr0 = ReceivedPower(nodes[u], nodes[v], cfg) / cfg.NoiseMw();
      for (const McsEntry& e : mcs.entries()) {
        if (snr0 < e.beta) break;
        Link link;
        link.id = static_cast<LinkId>(links.size());
        link.u = u;
        link.v = v;
        link.mcs = e.index;
        link.snr0 = snr0;
        link.pps = pps_by_mcs[e.index];
        link.cap = cfg.num_slots * link.pps;
        links.push_back(link);
      }
    }
  }
  return links;
}

double CalibrateRefGain(const RadioConfig& cfg, double beta0, double range_m) {
  return beta0 * cfg.NoiseMw() * std::pow(range_m, cfg.alpha) /
         cfg.tx_power_mw;
}

double RangeForThreshold(const RadioConfig& cfg, double beta) {
  return std::pow(cfg.tx_power_mw * cfg.ref_gain / (beta * cfg.NoiseMw()),
                  1.0 / cfg.alpha);
}

}  // namespace vidmesh
