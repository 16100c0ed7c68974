#ifndef VIDMESH_SCENARIO_H_
#define VIDMESH_SCENARIO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "vidmesh/radio.h"

namespace vidmesh {

struct Scenario {
  std::string name;
  std::vector<Node> nodes;
  RadioConfig radio = RadioConfig::Defaults();
  McsTable mcs = McsTable::Default();
  std::vector<StreamRequest> streams;

  // Throws InputError on duplicate/non-dense ids, non-finite or coincident
  // coordinates, or malformed requests.
  void Validate() const;
};

// Scenario files are JSON:
//   { "name": ..., "nodes": [{"id":0,"x":..,"y":..}, ...],
//     "radio": {"tx_power_mw":.., "noise_dbm":.., "alpha":.., "ref_gain":..,
//               "mu_db":.., "num_freq":.., "num_slots":.., "slot_duration_s":..,
//               "packet_payload_bits":.., "mac_efficiency":..},
//     "mcs": [{"index":0, "rate_mbps":6, "beta_db":3}, ...],
//     "streams": [{"source":..,"dest":..,"demand_mbps":..}, ...] }
// Every radio field is optional and falls back to RadioConfig::Defaults().
// A missing "mcs" block means McsTable::Default().
Scenario LoadScenario(const std::string& path);
Scenario ParseScenario(const std::string& json_text);
std::string SerializeScenario(const Scenario& scenario);
void SaveScenario(const Scenario& scenario, const std::string& path);

// n_side x n_side lattice over an area x area square, row-major ids. k
// distinct (source, dest) pairs drawn from `seed`.
Scenario GenGrid(int k, double demand_mbps, uint64_t seed, int n_side = 7,
                 double area_m = 1000.0);

// n nodes every 360/n degrees on a circle; requests a_1 = ceil(n/k),
// b_i = (a_i + floor(n/k)) mod n, a_{i+1} = b_i.
Scenario GenCircle(int k, double demand_mbps, int n = 24,
                   double radius_m = 500.0);

// Uniform random placement (rejecting near-coincident points) with random
// request pairs.
Scenario GenRandom(int n, int k, double demand_mbps, uint64_t seed,
                   double area_m = 1000.0);

}  // namespace vidmesh

#endif  // VIDMESH_SCENARIO_H_
