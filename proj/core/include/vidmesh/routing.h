#ifndef VIDMESH_ROUTING_H_
#define VIDMESH_ROUTING_H_

#include <cstdint>
#include <vector>

#include "vidmesh/flow.h"
#include "vidmesh/network.h"

namespace vidmesh {

// A stream path with a channel, used by the unscheduled (multi-radio) mode.
struct Route {
  StreamId stream = 0;
  std::vector<LinkId> links;
  int freq = 0;
  double weight = 0.0;  // packets per period carried by this path
};

enum class ChannelPolicy {
  kRoundRobin,  // i-th routed stream on channel i mod F
  kRandom,      // seeded uniform channel per stream
};

// Max-bottleneck shortest path per stream: the largest pps threshold
// admitting an a->b path, then fewest hops, then smallest node sequence.
// Rejected (disconnected) streams are omitted. weight = min(demand,
// bottleneck capacity), floored to whole packets.
std::vector<Route> ShortpRoute(const Network& net, ChannelPolicy policy,
                               uint64_t seed);

// mf(e, s) from one route per stream: the route weight on each of its links.
MfTable RoutesToMf(const Network& net, const std::vector<Route>& routes);

// Merges peeled paths into weighted routes (identical link sequences summed)
// and gives each route one channel: the channel carrying most of the
// stream's LP flow along the path when `flow` has a frequency split, else
// round-robin over routes.
std::vector<Route> PathsToRoutes(const Network& net, const FlowPathSet& paths,
                                 const MultiFlow* flow);

// Sequence of nodes visited by a link path, starting at the first sender.
std::vector<NodeId> PathNodes(const Network& net, const std::vector<LinkId>& links);

}  // namespace vidmesh

#endif  // VIDMESH_ROUTING_H_
