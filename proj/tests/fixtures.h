// Small hand-built scenarios shared by the unit and acceptance tests.
#ifndef VIDMESH_TESTS_FIXTURES_H_
#define VIDMESH_TESTS_FIXTURES_H_

#include <cmath>
#include <utility>
#include <vector>

#include "vidmesh/harness.h"
#include "vidmesh/scenario.h"

namespace vidmesh::testing {

inline Scenario MakeScenario(const std::vector<std::pair<double, double>>& xy,
                             const std::vector<std::pair<NodeId, NodeId>>& pairs,
                             double demand_mbps = 10.0) {
  Scenario sc;
  sc.name = "fixture";
  for (size_t i = 0; i < xy.size(); ++i) {
    sc.nodes.push_back({static_cast<NodeId>(i), xy[i].first, xy[i].second});
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    sc.streams.push_back({static_cast<StreamId>(i), pairs[i].first, pairs[i].second,
                          demand_mbps});
  }
  return sc;
}

// n nodes on the x axis, `spacing` apart.
inline std::vector<std::pair<double, double>> LineXY(int n, double spacing) {
  std::vector<std::pair<double, double>> xy;
  for (int i = 0; i < n; ++i) xy.emplace_back(i * spacing, 0.0);
  return xy;
}

// Received power with the module's formula written out again.
inline double PowerOracle(const RadioConfig& cfg, double d) {
  return cfg.tx_power_mw * cfg.ref_gain / std::pow(d, cfg.alpha);
}

inline double SinrOracle(const RadioConfig& cfg, const std::vector<Node>& nodes, NodeId u,
                         NodeId v, const std::vector<NodeId>& others) {
  auto dist = [&](NodeId a, NodeId b) {
    return std::hypot(nodes[a].x - nodes[b].x, nodes[a].y - nodes[b].y);
  };
  double noise = std::pow(10.0, cfg.noise_dbm / 10.0);
  for (NodeId x : others) {
    if (x != u) noise += PowerOracle(cfg, dist(x, v));
  }
  return PowerOracle(cfg, dist(u, v)) / noise;
}

}  // namespace vidmesh::testing

#endif  // VIDMESH_TESTS_FIXTURES_H_
