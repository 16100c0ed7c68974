#include "vidmesh/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vidmesh/error.h"

namespace vidmesh {

using nlohmann::json;

void Scenario::Validate() const {
  radio.Validate();
  mcs.Validate();
  if (nodes.size() < 2) throw InputError("scenario needs at least two nodes");
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != static_cast<NodeId>(i))
      throw InputError("node ids must be unique and dense in [0, n)");
    if (!std::isfinite(nodes[i].x) || !std::isfinite(nodes[i].y))
      throw InputError("node coordinates must be finite");
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      if (!(Distance(nodes[i], nodes[j]) > 0)) {
        std::ostringstream msg;
        msg << "coincident nodes " << i << " and " << j;
        throw InputError(msg.str());
      }
    }
  }
  const NodeId n = static_cast<NodeId>(nodes.size());
  for (size_t s = 0; s < streams.size(); ++s) {
    const StreamRequest& r = streams[s];
    if (r.index != static_cast<StreamId>(s))
      throw InputError("stream indices must be dense");
    if (r.source < 0 || r.source >= n || r.dest < 0 || r.dest >= n)
      throw InputError("stream endpoint out of range");
    if (r.source == r.dest) throw InputError("stream source equals dest");
    if (!(r.demand_mbps > 0)) throw InputError("stream demand must be > 0");
  }
}

Scenario ParseScenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario parse error: ") + e.what());
  }
  Scenario sc;
  try {
    sc.name = doc.value("name", std::string("scenario"));
    for (const json& jn : doc.at("nodes")) {
      sc.nodes.push_back(
          {jn.at("id").get<int>(), jn.at("x").get<double>(),
           jn.at("y").get<double>()});
    }
    std::sort(sc.nodes.begin(), sc.nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    RadioConfig radio = RadioConfig::Defaults();
    if (doc.contains("radio")) {
      const json& r = doc["radio"];
      radio.tx_power_mw = r.value("tx_power_mw", radio.tx_power_mw);
      radio.noise_dbm = r.value("noise_dbm", radio.noise_dbm);
      radio.alpha = r.value("alpha", radio.alpha);
      radio.ref_gain = r.value("ref_gain", radio.ref_gain);
      if (r.contains("mu_db")) radio.mu = DbToLinear(r["mu_db"].get<double>());
      radio.mu = r.value("mu", radio.mu);
      radio.num_freq = r.value("num_freq", radio.num_freq);
      radio.num_slots = r.value("num_slots", radio.num_slots);
      radio.slot_duration_s = r.value("slot_duration_s", radio.slot_duration_s);
      radio.packet_payload_bits =
          r.value("packet_payload_bits", radio.packet_payload_bits);
      radio.mac_efficiency = r.value("mac_efficiency", radio.mac_efficiency);
      radio.stream_bits_per_mbit =
          r.value("stream_bits_per_mbit", radio.stream_bits_per_mbit);
    }
    sc.radio = radio;
    if (doc.contains("mcs")) {
      std::vector<McsEntry> entries;
      for (const json& jm : doc["mcs"]) {
        McsEntry e;
        e.index = jm.at("index").get<int>();
        e.rate_mbps = jm.at("rate_mbps").get<double>();
        e.beta = jm.contains("beta_db")
                     ? DbToLinear(jm["beta_db"].get<double>())
                     : jm.at("beta").get<double>();
        entries.push_back(e);
      }
      sc.mcs = McsTable(std::move(entries));
    }
    if (doc.contains("streams")) {
      for (const json& js : doc["streams"]) {
        StreamRequest r;
        r.index = static_cast<StreamId>(sc.streams.size());
        r.source = js.at("source").get<int>();
        r.dest = js.at("dest").get<int>();
        r.demand_mbps = js.at("demand_mbps").get<double>();
        sc.streams.push_back(r);
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario schema error: ") + e.what());
  }
  sc.Validate();
  return sc;
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenario(buf.str());
}

std::string SerializeScenario(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  json nodes = json::array();
  for (const Node& n : sc.nodes) nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  doc["nodes"] = nodes;
  doc["radio"] = {{"tx_power_mw", sc.radio.tx_power_mw},
                  {"noise_dbm", sc.radio.noise_dbm},
                  {"alpha", sc.radio.alpha},
                  {"ref_gain", sc.radio.ref_gain},
                  {"mu", sc.radio.mu},
                  {"num_freq", sc.radio.num_freq},
                  {"num_slots", sc.radio.num_slots},
                  {"slot_duration_s", sc.radio.slot_duration_s},
                  {"packet_payload_bits", sc.radio.packet_payload_bits},
                  {"mac_efficiency", sc.radio.mac_efficiency},
                  {"stream_bits_per_mbit", sc.radio.stream_bits_per_mbit}};
  json mcs = json::array();
  for (const McsEntry& e : sc.mcs.entries()) {
    mcs.push_back({{"index", e.index},
                   {"rate_mbps", e.rate_mbps},
                   {"beta_db", LinearToDb(e.beta)}});
  }
  doc["mcs"] = mcs;
  json streams = json::array();
  for (const StreamRequest& r : sc.streams) {
    streams.push_back(
        {{"source", r.source}, {"dest", r.dest}, {"demand_mbps", r.demand_mbps}});
  }
  doc["streams"] = streams;
  return doc.dump(2);
}

void SaveScenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write scenario file " + path);
  out << SerializeScenario(scenario) << "\n";
}

namespace {

std::vector<StreamRequest> RandomPairs(int n, int k, double demand_mbps,
                                       std::mt19937_64& rng) {
  if (static_cast<long>(k) > static_cast<long>(n) * (n - 1))
    throw InputError("more requests than distinct node pairs");
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::set<std::pair<int, int>> used;
  std::vector<StreamRequest> streams;
  while (static_cast<int>(streams.size()) < k) {
    const int a = pick(rng);
    const int b = pick(rng);
    if (a == b || !used.insert({a, b}).second) continue;
    streams.push_back(
        {static_cast<StreamId>(streams.size()), a, b, demand_mbps});
  }
  return streams;
}

}  // namespace

Scenario GenGrid(int k, double demand_mbps, uint64_t seed, int n_side,
                 double area_m) {
  Scenario sc;
  std::ostringstream name;
  name << "grid" << n_side << "x" << n_side << "_k" << k << "_seed" << seed;
  sc.name = name.str();
  const double spacing = area_m / n_side;
  for (int row = 0; row < n_side; ++row) {
    for (int col = 0; col < n_side; ++col) {
      sc.nodes.push_back({row * n_side + col, col * spacing, row * spacing});
    }
  }
  std::mt19937_64 rng(seed);
  sc.streams = RandomPairs(n_side * n_side, k, demand_mbps, rng);
  sc.Validate();
  return sc;
}

Scenario GenCircle(int k, double demand_mbps, int n, double radius_m) {
  if (k < 1 || k > n) throw InputError("circle needs 1 <= k <= n");
  Scenario sc;
  std::ostringstream name;
  name << "circle" << n << "_k" << k;
  sc.name = name.str();
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n;
    sc.nodes.push_back(
        {i, radius_m * std::cos(theta), radius_m * std::sin(theta)});
  }
  const int step = n / k;
  int a = (n + k - 1) / k;
  for (int i = 0; i < k; ++i) {
    const int b = (a + step) % n;
    sc.streams.push_back({i, a % n, b, demand_mbps});
    a = b;
  }
  sc.Validate();
  return sc;
}

Scenario GenRandom(int n, int k, double demand_mbps, uint64_t seed,
                   double area_m) {
  Scenario sc;
  std::ostringstream name;
  name << "random" << n << "_k" << k << "_seed" << seed;
  sc.name = name.str();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, area_m);
  while (static_cast<int>(sc.nodes.size()) < n) {
    Node cand{static_cast<NodeId>(sc.nodes.size()), coord(rng), coord(rng)};
    bool ok = true;
    for (const Node& other : sc.nodes) {
      if (Distance(cand, other) < 1.0) ok = false;
    }
    if (ok) sc.nodes.push_back(cand);
  }
  sc.streams = RandomPairs(n, k, demand_mbps, rng);
  sc.Validate();
  return sc;
}

}  // namespace vidmesh
