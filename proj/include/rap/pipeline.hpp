#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>

#include "rap/chirp.hpp"
#include "rap/estimate.hpp"
#include "rap/packet.hpp"

namespace rap {

enum class QueuePolicy {
  Block,      // producer waits; lossless (file replay, equivalence runs)
  DropOldest  // producer evicts the oldest item and counts it (live overload)
};

/// Mutex+cv FIFO with a hard capacity. Memory stays bounded under either
/// policy; DropOldest never drops silently.
template <typename T>
class BoundedQueue {
 public:
  BoundedQueue(std::size_t capacity, QueuePolicy policy)
      : capacity_(capacity), policy_(policy) {}

  void push(T item) {
    std::unique_lock lock(mutex_);
    if (policy_ == QueuePolicy::Block) {
      not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
      if (closed_) return;
    } else if (items_.size() >= capacity_) {
      items_.pop_front();
      ++dropped_;
    }
    items_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  std::uint64_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable not_empty_, not_full_;
  std::deque<T> items_;
  std::size_t capacity_;
  QueuePolicy policy_;
  bool closed_ = false;
  std::uint64_t dropped_ = 0;
};

/// Per-window wall-clock stage times, milliseconds. decode/correlate sums
/// cover the frames newly consumed by the window (stride frames at steady
/// state); total spans source arrival of the newest frame to prediction out.
struct StageLatency {
  double decode_ms = 0.0;
  double correlate_ms = 0.0;
  double window_ms = 0.0;
  double predict_ms = 0.0;
  double total_ms = 0.0;
};

struct LatencyStats {
  void add(double v) { values.push_back(v); }
  double mean() const;
  double p95() const;
  std::vector<double> values;
};

struct LatencySummary {
  LatencyStats decode, correlate, window, predict, total;
  void add(const StageLatency& lat);
  std::string to_json(std::uint64_t windows, std::uint64_t dropped) const;
};

struct PipelineOutput {
  std::int64_t window_index = 0;  // index of the window's last frame
  double t_last = 0.0;
  bool degraded = false;  // some frame in the window was zero-substituted
  std::optional<Eigen::Matrix<double, 60, 1>> pose;
  std::optional<int> gesture;
  StageLatency latency;
};

struct PipelineConfig {
  ChirpParams chirp;  // correlation template
  EchoConfig echo;
  WindowSpec window;
  double band_lo = 0.0;  // per-frame band-pass conditioning; 0/0 disables
  double band_hi = 0.0;
  const KnnModel* model = nullptr;  // nullptr: run through windowing only
  std::size_t queue_capacity = 64;
  bool threaded = true;
  QueuePolicy window_queue_policy = QueuePolicy::Block;
};

struct PipelineResult {
  std::vector<PipelineOutput> outputs;
  EchoProfile profile;  // the full assembled profile (batch-identical)
  int t0 = 0;
  std::vector<GapEvent> gaps;
  std::uint64_t dropped_windows = 0;
  LatencySummary latency;
};

/// Pull packets from `source` until it is exhausted and run
/// decode -> correlate/crop -> window -> normalize/predict. Stages are
/// deterministic state machines; the threaded and single-threaded executions
/// produce identical outputs (bit-exact, given a lossless window queue).
/// Sequence gaps substitute zero frames and flag affected windows.
PipelineResult run_pipeline(const std::function<std::optional<SensorPacket>()>& source,
                            const PipelineConfig& cfg);

}  // namespace rap
