#ifndef VIDMESH_SCHEDULE_H_
#define VIDMESH_SCHEDULE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "vidmesh/flow.h"
#include "vidmesh/interference.h"
#include "vidmesh/network.h"
#include "vidmesh/routing.h"

namespace vidmesh {

// The table A: num_freq x num_slots cells, each a set of links that
// transmit in that (frequency, slot) every period.
class ScheduleTable {
 public:
  ScheduleTable() = default;
  ScheduleTable(int num_freq, int num_slots);

  int num_freq() const { return num_freq_; }
  int num_slots() const { return num_slots_; }
  const std::vector<LinkId>& cell(int j, int t) const {
    return cells_[static_cast<size_t>(t) * num_freq_ + j];
  }
  void Add(int j, int t, LinkId e);
  void Remove(int j, int t, LinkId e);
  // Appends an empty slot; returns its index.
  int AppendSlot();
  // Number of cells holding e.
  int Occurrences(LinkId e) const;
  // Total link placements over all cells.
  int64_t Placements() const;

 private:
  int num_freq_ = 0;
  int num_slots_ = 0;
  std::vector<std::vector<LinkId>> cells_;  // slot-major
};

// Slots the greedy scheduler could not place.
struct Deficit {
  LinkId link = 0;
  int freq = 0;
  int slots = 0;
};

struct GreedyResult {
  ScheduleTable table;
  MfTable mf;
  // slots[e * F + j]: placements the flow asked for, floor(f^j(e)/pps(e)).
  std::vector<int> wanted;
  std::vector<Deficit> deficit;
  int64_t deficit_slots() const;
};

// First-fit scheduling of floor(f^j(e)/pps(e)) slots per (e, j), links
// taken by descending f^j(e)/c(e) (ties by link id, then j). mf is
// `target` where the placed capacity covers it, otherwise the placed
// capacity apportioned over streams by largest remainder.
GreedyResult GreedySchedule(const Network& net, const ConflictGraph& graph,
                            const MultiFlow& flow, const MfTable& target);

struct AugmentResult {
  int added_slots = 0;
  int period = 0;          // T'
  double dilution = 1.0;   // T / T'
};

// Places every deficit slot in slots appended after the period (first fit
// among the appended slots, else a new one) and refreshes mf to `target`
// now that the capacity is there.
AugmentResult AugmentSchedule(const Network& net, const ConflictGraph& graph,
                              const MfTable& target, GreedyResult& result);

enum class FreqChoice {
  kLeastLoaded,  // try channels by current occupancy, ties by index
  kFixed,        // each stream keeps one channel
};

struct PeelOptions {
  FreqChoice freq_choice = FreqChoice::kLeastLoaded;
  std::vector<int> stream_freq;  // kFixed only, one per stream
};

struct PeelResult {
  ScheduleTable table;
  MfTable mf;
  int paths_total = 0;
  int paths_placed = 0;
  std::vector<int64_t> wanted;     // per stream, sum of path values
  std::vector<int64_t> scheduled;  // per stream, placed path values
  double ScheduledFraction() const;
};

// Round-robin over streams, one path at a time; the links of a path go to
// consecutive feasible slots in cyclic order, starting one slot after the
// previous path's first slot. A path that does not fit is rolled back.
PeelResult PathPeelSchedule(const Network& net, const ConflictGraph& graph,
                            const FlowPathSet& paths,
                            const PeelOptions& options = {});

// Splits each route's weight into bottleneck-sized paths.
FlowPathSet RoutesToPaths(const Network& net, const std::vector<Route>& routes);

struct SupportViolation {
  enum class Kind { kCapacity, kRadio, kConflict } kind = Kind::kCapacity;
  LinkId a = -1;
  LinkId b = -1;
  int freq = -1;
  int slot = -1;
  std::string Describe(const Network& net) const;
};

struct SupportReport {
  bool ok = true;
  std::vector<SupportViolation> violations;
};

// Slot capacity per link, one radio per node per slot, and pairwise conflict
// freedom inside every cell.
SupportReport VerifySupport(const Network& net, const ConflictGraph& graph,
                            const ScheduleTable& table, const MfTable& mf);

// freq,slot,link,u,v,mcs
void WriteTableCsv(std::ostream& out, const Network& net,
                   const ScheduleTable& table);
// link,stream,packets
void WriteMfCsv(std::ostream& out, const MfTable& mf);

// Readers for the two dumps. The table grows past min_slots when the dump
// holds later slots (augmented periods). Throw InputError on bad rows.
ScheduleTable ReadTableCsv(std::istream& in, const Network& net, int min_slots);
MfTable ReadMfCsv(std::istream& in, const Network& net);

}  // namespace vidmesh

#endif  // VIDMESH_SCHEDULE_H_
