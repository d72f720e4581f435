#pragma once

#include <cstddef>
#include <vector>

namespace ppdiag {

// A simple point pattern on the observation window (0, T]: strictly
// increasing event times, all in (0, T]. Immutable after construction.
class EventSequence {
 public:
  EventSequence(std::vector<double> times, double horizon);

  static EventSequence empty(double horizon) { return EventSequence({}, horizon); }

  const std::vector<double>& times() const { return times_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

 private:
  std::vector<double> times_;
  double horizon_;
};

// Number of events in (0, t]; right-continuous and non-decreasing in t.
std::size_t counting_process(const EventSequence& seq, double t);

// Directed sender/receiver pair; self-pairs are invalid.
struct PairIndex {
  int sender;
  int receiver;

  PairIndex(int sender_node, int receiver_node);

  friend bool operator==(const PairIndex& a, const PairIndex& b) {
    return a.sender == b.sender && a.receiver == b.receiver;
  }
  friend bool operator<(const PairIndex& a, const PairIndex& b) {
    if (a.sender != b.sender) return a.sender < b.sender;
    return a.receiver < b.receiver;
  }
};

struct NetworkEvent {
  double time;
  int sender;
  int receiver;
};

// Timestamped directed interactions among nodes {1..N} on (0, T].
// Events are time-sorted; each directed pair's projection is a valid
// EventSequence (per-pair times strictly increase). No self-loops.
class NetworkEventLog {
 public:
  NetworkEventLog(int node_count, std::vector<NetworkEvent> events, double horizon);

  int node_count() const { return node_count_; }
  const std::vector<NetworkEvent>& events() const { return events_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return events_.size(); }

 private:
  int node_count_;
  std::vector<NetworkEvent> events_;
  double horizon_;
};

// Event times of one directed pair, same horizon. Empty sequences are fine.
EventSequence project_pair(const NetworkEventLog& log, const PairIndex& pair);

// All N(N-1) ordered pairs of a network, row-major by sender.
std::vector<PairIndex> all_ordered_pairs(int node_count);

// Disjoint labeled classes covering {1..N} exactly.
class Partition {
 public:
  Partition(std::vector<std::vector<int>> classes, int node_count);

  int node_count() const { return node_count_; }
  int class_count() const { return static_cast<int>(classes_.size()); }
  const std::vector<std::vector<int>>& classes() const { return classes_; }
  int class_of(int node) const;

 private:
  std::vector<std::vector<int>> classes_;
  std::vector<int> class_of_;
  int node_count_;
};

}  // namespace ppdiag
