#include "rap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <thread>

#include "rap/errors.hpp"

namespace rap {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

struct DecodedFrame {
  std::int64_t frame_index = 0;
  Eigen::VectorXd samples;
  bool zero_filled = false;
  Clock::time_point source_ts;
  double decode_ms = 0.0;
};

struct CroppedFrame {
  EchoFrame frame;
  bool zero_filled = false;
  Clock::time_point source_ts;
  double decode_ms = 0.0;
  double correlate_ms = 0.0;
};

struct RawWindow {
  std::int64_t last_frame_index = 0;
  Eigen::MatrixXd differential;
  Eigen::MatrixXd original;
  bool degraded = false;
  Clock::time_point source_ts;
  StageLatency latency;  // decode/correlate/window filled; predict later
};

// Decode + gap repair. A seq jump of k inserts k zero frames so the 83.33 Hz
// frame clock stays monotonic.
class DecodeStage {
 public:
  explicit DecodeStage(const EchoConfig& echo) : frame_len_(echo.frame_len) {}

  std::vector<DecodedFrame> feed(const SensorPacket& packet, Clock::time_point ts) {
    const auto t0 = Clock::now();
    std::vector<DecodedFrame> out;
    if (have_prev_ && packet.seq != prev_seq_ + 1) {
      const std::int64_t missing = static_cast<std::int64_t>(packet.seq) -
                                   static_cast<std::int64_t>(prev_seq_) - 1;
      if (missing > 0) {
        gaps.push_back({prev_seq_, packet.seq, missing});
        for (std::int64_t i = 0; i < missing; ++i) {
          DecodedFrame zero;
          zero.frame_index = next_index_++;
          zero.samples = Eigen::VectorXd::Zero(frame_len_);
          zero.zero_filled = true;
          zero.source_ts = ts;
          out.push_back(std::move(zero));
        }
      } else {
        throw sequencing_error("pipeline: sequence number went backwards");
      }
    }
    DecodedFrame frame;
    frame.frame_index = next_index_++;
    frame.samples = packet.samples();
    frame.source_ts = ts;
    frame.decode_ms = ms_between(t0, Clock::now());
    out.push_back(std::move(frame));
    prev_seq_ = packet.seq;
    have_prev_ = true;
    return out;
  }

  std::vector<GapEvent> gaps;

 private:
  int frame_len_;
  bool have_prev_ = false;
  std::uint32_t prev_seq_ = 0;
  std::int64_t next_index_ = 0;
};

// Correlate + crop. Buffers the first t0_estimation_frames, locks t0, then
// streams. Identical math to the batch compute_profile path.
class CorrelateStage {
 public:
  CorrelateStage(const PipelineConfig& cfg, Waveform tmpl)
      : cfg_(cfg), tmpl_(std::move(tmpl)) {}

  std::vector<CroppedFrame> feed(DecodedFrame frame) {
    const auto t0 = Clock::now();
    Waveform rx;
    rx.sample_rate = cfg_.echo.sample_rate;
    rx.samples = std::move(frame.samples);
    Eigen::VectorXd corr;
    if (cfg_.band_lo > 0 && cfg_.band_hi > cfg_.band_lo) {
      corr = cross_correlate(bandpass(rx, cfg_.band_lo, cfg_.band_hi), tmpl_);
    } else {
      corr = cross_correlate(rx, tmpl_);
    }
    CroppedFrame pending;
    pending.zero_filled = frame.zero_filled;
    pending.source_ts = frame.source_ts;
    pending.decode_ms = frame.decode_ms;
    pending.frame.frame_index = frame.frame_index;

    std::vector<CroppedFrame> out;
    if (!t0_locked_) {
      buffer_.push_back({std::move(pending), std::move(corr)});
      if (static_cast<int>(buffer_.size()) >= cfg_.echo.t0_estimation_frames)
        out = lock_t0();
    } else {
      pending.frame = crop_frame(corr, t0_, cfg_.echo, pending.frame.frame_index);
      out.push_back(std::move(pending));
    }
    if (!out.empty()) out.back().correlate_ms += ms_between(t0, Clock::now());
    return out;
  }

  /// Flush: called at stream end in case fewer frames than the estimation
  /// budget arrived.
  std::vector<CroppedFrame> finish() {
    if (t0_locked_ || buffer_.empty()) return {};
    return lock_t0();
  }

  int t0() const { return t0_; }

 private:
  std::vector<CroppedFrame> lock_t0() {
    std::vector<Eigen::VectorXd> corrs;
    corrs.reserve(buffer_.size());
    for (const auto& [pending, corr] : buffer_) corrs.push_back(corr);
    t0_ = estimate_t0(corrs, cfg_.echo);
    t0_locked_ = true;
    std::vector<CroppedFrame> out;
    out.reserve(buffer_.size());
    for (auto& [pending, corr] : buffer_) {
      pending.frame = crop_frame(corr, t0_, cfg_.echo, pending.frame.frame_index);
      out.push_back(std::move(pending));
    }
    buffer_.clear();
    return out;
  }

  const PipelineConfig& cfg_;
  Waveform tmpl_;
  std::vector<std::pair<CroppedFrame, Eigen::VectorXd>> buffer_;
  bool t0_locked_ = false;
  int t0_ = 0;
};

// Window assembly. Owns the full frame history (the assembled profile is part
// of the result) and emits one raw window per stride.
class WindowStage {
 public:
  explicit WindowStage(const PipelineConfig& cfg) : cfg_(cfg) {}

  std::optional<RawWindow> feed(CroppedFrame frame) {
    const auto t0 = Clock::now();
    pending_decode_ms_ += frame.decode_ms;
    pending_correlate_ms_ += frame.correlate_ms;

    const Eigen::Index col = static_cast<Eigen::Index>(frames_.size());
    Eigen::VectorXd diff_col;
    if (col == 0) {
      diff_col = Eigen::VectorXd::Zero(frame.frame.values.size());
    } else {
      diff_col = frame.frame.values - frames_.back().values;
    }
    diff_cols_.push_back(std::move(diff_col));
    frames_.push_back(frame.frame);
    recent_degraded_.push_back(frame.zero_filled);
    if (static_cast<int>(recent_degraded_.size()) > cfg_.window.width)
      recent_degraded_.pop_front();

    const Eigen::Index width = cfg_.window.width;
    if (col + 1 < width) return std::nullopt;
    if ((col + 1 - width) % cfg_.window.stride != 0) return std::nullopt;

    RawWindow w;
    w.last_frame_index = frame.frame.frame_index;
    w.original.resize(frames_.front().values.size(), width);
    w.differential.resize(frames_.front().values.size(), width);
    for (Eigen::Index j = 0; j < width; ++j) {
      const auto src = static_cast<std::size_t>(col + 1 - width + j);
      w.original.col(j) = frames_[src].values;
      w.differential.col(j) = diff_cols_[src];
    }
    w.degraded = std::any_of(recent_degraded_.begin(), recent_degraded_.end(),
                             [](bool b) { return b; });
    w.source_ts = frame.source_ts;
    w.latency.decode_ms = pending_decode_ms_;
    w.latency.correlate_ms = pending_correlate_ms_;
    pending_decode_ms_ = 0.0;
    pending_correlate_ms_ = 0.0;
    w.latency.window_ms = ms_between(t0, Clock::now());
    return w;
  }

  EchoProfile profile() const {
    return build_profile(frames_, cfg_.echo);
  }
  bool empty() const { return frames_.empty(); }

 private:
  const PipelineConfig& cfg_;
  std::vector<EchoFrame> frames_;
  std::vector<Eigen::VectorXd> diff_cols_;
  std::deque<bool> recent_degraded_;
  double pending_decode_ms_ = 0.0;
  double pending_correlate_ms_ = 0.0;
};

PipelineOutput predict_stage(RawWindow w, const PipelineConfig& cfg) {
  const auto t0 = Clock::now();
  Eigen::MatrixXd diff = std::move(w.differential);
  Eigen::MatrixXd orig = std::move(w.original);
  normalize_window(diff, orig);
  LabeledWindow window;
  window.differential = diff.cast<float>();
  window.original = orig.cast<float>();
  window.t_last =
      static_cast<double>(w.last_frame_index) * cfg.echo.frame_period();

  PipelineOutput out;
  out.window_index = w.last_frame_index;
  out.t_last = window.t_last;
  out.degraded = w.degraded;
  out.latency = w.latency;
  if (cfg.model) {
    if (cfg.model->kind() == LabelKind::Pose) {
      out.pose = flatten(predict_pose(*cfg.model, window));
    } else {
      out.gesture = predict_gesture(*cfg.model, window);
    }
  }
  out.latency.predict_ms = ms_between(t0, Clock::now());
  out.latency.total_ms = ms_between(w.source_ts, Clock::now());
  return out;
}

}  // namespace

double LatencyStats::mean() const {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double LatencyStats::p95() const {
  if (values.empty()) return 0.0;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
  return sorted[std::min(rank, sorted.size() - 1)];
}

void LatencySummary::add(const StageLatency& lat) {
  decode.add(lat.decode_ms);
  correlate.add(lat.correlate_ms);
  window.add(lat.window_ms);
  predict.add(lat.predict_ms);
  total.add(lat.total_ms);
}

std::string LatencySummary::to_json(std::uint64_t windows,
                                    std::uint64_t dropped) const {
  auto stage = [](const LatencyStats& s) {
    return json{{"mean_ms", s.mean()}, {"p95_ms", s.p95()}};
  };
  json doc;
  doc["windows"] = windows;
  doc["dropped_windows"] = dropped;
  doc["stages"] = {{"decode", stage(decode)},
                   {"correlate", stage(correlate)},
                   {"window", stage(window)},
                   {"predict", stage(predict)},
                   {"total", stage(total)}};
  // Stage names used by the delay-breakdown table this report is compared
  // against; only in-process stages are measured here.
  doc["table6"] = {{"Echo Profile Calculation", correlate.mean()},
                   {"Inference", predict.mean()}};
  return doc.dump(2);
}

PipelineResult run_pipeline(const std::function<std::optional<SensorPacket>()>& source,
                            const PipelineConfig& cfg) {
  cfg.echo.validate();
  cfg.window.validate();
  if (cfg.chirp.frame_len != cfg.echo.frame_len)
    throw parameter_error("pipeline: chirp and echo frame_len disagree");
  if (cfg.model && cfg.model->exemplar_count() == 0)
    throw state_error("pipeline: model has no exemplars");
  if (cfg.queue_capacity < 1) throw parameter_error("pipeline: queue capacity");

  const Waveform tmpl = generate_chirp(cfg.chirp);
  DecodeStage decode(cfg.echo);
  CorrelateStage correlate(cfg, tmpl);
  WindowStage windowing(cfg);

  PipelineResult result;

  if (!cfg.threaded) {
    while (auto packet = source()) {
      for (auto& frame : decode.feed(*packet, Clock::now()))
        for (auto& cropped : correlate.feed(std::move(frame)))
          if (auto w = windowing.feed(std::move(cropped)))
            result.outputs.push_back(predict_stage(std::move(*w), cfg));
    }
    for (auto& cropped : correlate.finish())
      if (auto w = windowing.feed(std::move(cropped)))
        result.outputs.push_back(predict_stage(std::move(*w), cfg));
  } else {
    BoundedQueue<DecodedFrame> frame_q(cfg.queue_capacity, QueuePolicy::Block);
    BoundedQueue<CroppedFrame> cropped_q(cfg.queue_capacity, QueuePolicy::Block);
    BoundedQueue<RawWindow> window_q(cfg.queue_capacity, cfg.window_queue_policy);

    std::thread decode_thread([&] {
      while (auto packet = source()) {
        for (auto& frame : decode.feed(*packet, Clock::now()))
          frame_q.push(std::move(frame));
      }
      frame_q.close();
    });
    std::thread correlate_thread([&] {
      while (auto frame = frame_q.pop())
        for (auto& cropped : correlate.feed(std::move(*frame)))
          cropped_q.push(std::move(cropped));
      for (auto& cropped : correlate.finish()) cropped_q.push(std::move(cropped));
      cropped_q.close();
    });
    std::thread window_thread([&] {
      while (auto cropped = cropped_q.pop())
        if (auto w = windowing.feed(std::move(*cropped)))
          window_q.push(std::move(*w));
      window_q.close();
    });

    while (auto w = window_q.pop())
      result.outputs.push_back(predict_stage(std::move(*w), cfg));

    decode_thread.join();
    correlate_thread.join();
    window_thread.join();
    result.dropped_windows = window_q.dropped();
  }

  result.gaps = std::move(decode.gaps);
  result.t0 = correlate.t0();
  if (!windowing.empty()) result.profile = windowing.profile();
  for (const auto& out : result.outputs) result.latency.add(out.latency);
  return result;
}

}  // namespace rap
