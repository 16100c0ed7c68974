#include "vidmesh/routing.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace vidmesh {

std::vector<Route> ShortpRoute(const Network& net, ChannelPolicy policy,
                               uint64_t seed) {
  std::set<int, std::greater<>> thresholds;
  for (const Link& l : net.links()) thresholds.insert(l.pps);
  std::mt19937_64 rng(seed);
  const int F = net.radio().num_freq;
  std::uniform_int_distribution<int> pick(0, F - 1);

  std::vector<Route> routes;
  int routed = 0;
  for (const StreamRequest& r : net.streams()) {
    // Draw even for rejected streams so channels do not shift with topology.
    const int random_freq = pick(rng);
    for (int thr : thresholds) {
      std::vector<bool> usable(net.num_links());
      for (const Link& l : net.links()) usable[l.id] = l.pps >= thr;
      std::vector<LinkId> path = ShortestLexPath(net, r.source, r.dest, usable);
      if (path.empty()) continue;
      Route route;
      route.stream = r.index;
      int cap = net.link(path.front()).cap;
      for (LinkId e : path) cap = std::min(cap, net.link(e).cap);
      route.weight = std::min<double>(std::floor(net.DemandPackets(r.index) + 1e-9), cap);
      route.links = std::move(path);
      route.freq = policy == ChannelPolicy::kRandom ? random_freq : routed % F;
      routes.push_back(std::move(route));
      ++routed;
      break;
    }
  }
  return routes;
}

MfTable RoutesToMf(const Network& net, const std::vector<Route>& routes) {
  MfTable mf(net.num_links(), net.num_streams());
  for (const Route& r : routes) {
    for (LinkId e : r.links) mf.at(e, r.stream) += static_cast<int>(r.weight);
  }
  return mf;
}

std::vector<Route> PathsToRoutes(const Network& net, const FlowPathSet& paths,
                                 const MultiFlow* flow) {
  const int F = net.radio().num_freq;
  std::vector<Route> routes;
  int counter = 0;
  for (const auto& stream_paths : paths.paths) {
    std::map<std::vector<LinkId>, size_t> index;
    for (const FlowPath& p : stream_paths) {
      auto it = index.find(p.links);
      if (it != index.end()) {
        routes[it->second].weight += p.val;
        continue;
      }
      Route r;
      r.stream = p.stream;
      r.links = p.links;
      r.weight = p.val;
      r.freq = counter % F;
      if (flow != nullptr) {
        std::vector<double> load(F, 0.0);
        for (LinkId e : p.links) {
          for (int j = 0; j < F; ++j) load[j] += flow->at(p.stream, j, e);
        }
        const double lo = *std::min_element(load.begin(), load.end());
        const double hi = *std::max_element(load.begin(), load.end());
        if (hi - lo > 1e-9 * std::max(1.0, hi)) {
          r.freq = static_cast<int>(std::max_element(load.begin(), load.end()) - load.begin());
        }
      }
      ++counter;
      index.emplace(r.links, routes.size());
      routes.push_back(std::move(r));
    }
  }
  return routes;
}

std::vector<NodeId> PathNodes(const Network& net, const std::vector<LinkId>& links) {
  std::vector<NodeId> nodes;
  if (links.empty()) return nodes;
  nodes.push_back(net.link(links.front()).u);
  for (LinkId e : links) nodes.push_back(net.link(e).v);
  return nodes;
}

}  // namespace vidmesh
