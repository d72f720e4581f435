#include "ppdiag/events.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ppdiag/errors.hpp"

namespace ppdiag {

EventSequence::EventSequence(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw ValidationError("event sequence horizon must be finite and > 0");
  for (std::size_t m = 0; m < times_.size(); ++m) {
    const double t = times_[m];
    if (!std::isfinite(t)) throw ValidationError("event time is not finite");
    if (!(t > 0.0))
      throw ValidationError("event times must be strictly positive (window is (0, T])");
    if (m > 0 && !(t > times_[m - 1]))
      throw ValidationError("event times must strictly increase (tied timestamps at index " +
                            std::to_string(m) + ")");
    if (t > horizon_)
      throw ValidationError("event time " + std::to_string(t) + " exceeds horizon");
  }
}

std::size_t counting_process(const EventSequence& seq, double t) {
  if (!(t >= 0.0) || t > seq.horizon())
    throw ValidationError("counting process time outside [0, horizon]");
  const auto& ts = seq.times();
  return static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
}

PairIndex::PairIndex(int sender_node, int receiver_node)
    : sender(sender_node), receiver(receiver_node) {
  if (sender < 1 || receiver < 1) throw ValidationError("node ids must be >= 1");
  if (sender == receiver)
    throw ValidationError("self-loop pair (" + std::to_string(sender) + "," +
                          std::to_string(receiver) + ") is invalid");
}

NetworkEventLog::NetworkEventLog(int node_count, std::vector<NetworkEvent> events, double horizon)
    : node_count_(node_count), events_(std::move(events)), horizon_(horizon) {
  if (node_count_ < 2) throw ValidationError("network needs at least 2 nodes");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw ValidationError("network log horizon must be finite and > 0");
  std::map<std::pair<int, int>, double> last_pair_time;
  double prev = 0.0;
  for (std::size_t m = 0; m < events_.size(); ++m) {
    const auto& e = events_[m];
    if (!std::isfinite(e.time) || !(e.time > 0.0) || e.time > horizon_)
      throw ValidationError("network event time outside (0, horizon] at row " + std::to_string(m));
    if (e.time < prev)
      throw ValidationError("network events must be sorted by time (row " + std::to_string(m) + ")");
    prev = e.time;
    if (e.sender < 1 || e.sender > node_count_ || e.receiver < 1 || e.receiver > node_count_)
      throw ValidationError("node id out of range at row " + std::to_string(m));
    if (e.sender == e.receiver)
      throw ValidationError("self-loop event at row " + std::to_string(m));
    auto [it, inserted] = last_pair_time.try_emplace({e.sender, e.receiver}, e.time);
    if (!inserted) {
      if (!(e.time > it->second))
        throw ValidationError("tied timestamps within pair (" + std::to_string(e.sender) + "," +
                              std::to_string(e.receiver) + ") at row " + std::to_string(m));
      it->second = e.time;
    }
  }
}

EventSequence project_pair(const NetworkEventLog& log, const PairIndex& pair) {
  if (pair.sender > log.node_count() || pair.receiver > log.node_count())
    throw ValidationError("pair node id out of range for this log");
  std::vector<double> times;
  for (const auto& e : log.events())
    if (e.sender == pair.sender && e.receiver == pair.receiver) times.push_back(e.time);
  return EventSequence(std::move(times), log.horizon());
}

std::vector<PairIndex> all_ordered_pairs(int node_count) {
  std::vector<PairIndex> pairs;
  pairs.reserve(static_cast<std::size_t>(node_count) * (node_count - 1));
  for (int i = 1; i <= node_count; ++i)
    for (int j = 1; j <= node_count; ++j)
      if (i != j) pairs.emplace_back(i, j);
  return pairs;
}

Partition::Partition(std::vector<std::vector<int>> classes, int node_count)
    : classes_(std::move(classes)), class_of_(node_count + 1, -1), node_count_(node_count) {
  if (node_count < 1) throw ValidationError("partition node count must be >= 1");
  if (classes_.empty()) throw ValidationError("partition must have at least one class");
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (classes_[c].empty()) throw ValidationError("partition class " + std::to_string(c) + " is empty");
    for (int node : classes_[c]) {
      if (node < 1 || node > node_count)
        throw ValidationError("partition node " + std::to_string(node) + " out of range 1.." +
                              std::to_string(node_count));
      if (class_of_[node] != -1)
        throw ValidationError("partition assigns node " + std::to_string(node) + " twice");
      class_of_[node] = static_cast<int>(c);
    }
  }
  for (int node = 1; node <= node_count; ++node)
    if (class_of_[node] == -1)
      throw ValidationError("partition misses node " + std::to_string(node));
}

int Partition::class_of(int node) const {
  if (node < 1 || node > node_count_) throw ValidationError("node id out of partition range");
  return class_of_[node];
}

}  // namespace ppdiag
