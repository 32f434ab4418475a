#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace loramesh {

/// Min-queue of timed callbacks. Ties on timestamp resolve in insertion order.
class EventQueue {
 public:
  using Action = std::function<void()>;

  std::uint64_t schedule(double at, Action action) {
    if (at < now_) throw std::logic_error("event scheduled in the past");
    const std::uint64_t seq = next_seq_++;
    heap_.push(Entry{at, seq, std::move(action)});
    return seq;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_; }
  double next_time() const { return heap_.top().at; }

  /// Pops and runs the earliest event. Returns false when empty.
  bool step() {
    if (heap_.empty()) return false;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.at;
    e.action();
    return true;
  }

  /// Moves the clock forward without running anything.
  void advance_to(double t) {
    if (t > now_) now_ = t;
  }

 private:
  struct Entry {
    double at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
};

}  // namespace loramesh
