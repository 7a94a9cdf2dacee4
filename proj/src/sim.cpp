#include "rap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "rap/errors.hpp"
#include "rap/fft.hpp"
#include "rap/parallel.hpp"
#include "rap/rng.hpp"

namespace rap {

Finger finger_from_name(const std::string& name) {
  if (name == "thumb") return Finger::Thumb;
  if (name == "index") return Finger::Index;
  if (name == "middle") return Finger::Middle;
  if (name == "ring") return Finger::Ring;
  if (name == "pinky") return Finger::Pinky;
  throw parameter_error("unknown finger: " + name);
}

std::string finger_name(Finger f) {
  switch (f) {
    case Finger::Thumb: return "thumb";
    case Finger::Index: return "index";
    case Finger::Middle: return "middle";
    case Finger::Ring: return "ring";
    case Finger::Pinky: return "pinky";
  }
  throw parameter_error("bad finger enum");
}

double speaker_mic_separation(const RingPlacement& placement) {
  return (placement.speaker_offset - placement.mic_offset).norm();
}

void validate_placement(const RingPlacement& placement) {
  if (placement.along_segment < 0 || placement.along_segment > 1)
    throw parameter_error("placement: along_segment must be in [0, 1]");
  if (std::abs(speaker_mic_separation(placement) - 5.4) > 1e-6)
    throw parameter_error("placement: speaker and mic must sit 5.4 mm apart");
}

namespace {

// Proximal segment endpoints per finger (MCP, PIP); the thumb uses MCP->IP.
std::pair<int, int> finger_segment(Finger f) {
  switch (f) {
    case Finger::Thumb: return {2, 3};
    case Finger::Index: return {5, 6};
    case Finger::Middle: return {9, 10};
    case Finger::Ring: return {13, 14};
    case Finger::Pinky: return {17, 18};
  }
  throw parameter_error("bad finger enum");
}

// Deterministic orthonormal frame with e3 = axis.
Eigen::Matrix3d segment_frame(const Eigen::Vector3d& axis) {
  const Eigen::Vector3d ref =
      std::abs(axis.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  Eigen::Matrix3d m;
  m.col(0) = ref.cross(axis).normalized();
  m.col(1) = axis.cross(m.col(0));
  m.col(2) = axis;
  return m;
}

}  // namespace

SpeakerMic ring_position(const HandPose& pose, const RingPlacement& placement) {
  const auto [mcp, pip] = finger_segment(placement.worn_finger);
  const Eigen::Vector3d a = pose.joints.col(mcp);
  const Eigen::Vector3d b = pose.joints.col(pip);
  const Eigen::Vector3d seg = b - a;
  if (seg.norm() < 1e-9)
    throw geometry_error("ring_position: zero-length finger segment");
  const Eigen::Vector3d center = a + placement.along_segment * seg;
  const Eigen::Matrix3d frame = segment_frame(seg.normalized());
  return {center + frame * placement.speaker_offset,
          center + frame * placement.mic_offset};
}

std::vector<Eigen::Vector3d> hand_reflectors(const HandPose& pose) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(kHandJoints + 1);
  for (int j = 0; j < kHandJoints; ++j) pts.push_back(pose.joints.col(j));
  Eigen::Vector3d palm = Eigen::Vector3d::Zero();
  for (int j : {0, 5, 9, 13, 17}) palm += pose.joints.col(j);
  pts.push_back(palm / 5.0);
  return pts;
}

namespace {

// Multiply-accumulate a circularly delayed copy of the frame spectrum.
void add_delayed(Eigen::VectorXcd& acc, const Eigen::VectorXcd& tx_spec,
                 double delay_samples, double gain) {
  const Eigen::Index n = acc.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k - n);
    const double angle = -2.0 * M_PI * m * delay_samples / static_cast<double>(n);
    acc[k] += gain * tx_spec[k] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
}

double reflector_gain(double d_spk_mm, double d_mic_mm, const SimConfig& cfg) {
  const double product = (d_spk_mm / 100.0) * (d_mic_mm / 100.0);
  const double a = cfg.reflector_coefficient /
                   std::pow(product, cfg.attenuation_exponent / 2.0);
  return std::min(a, 1.0);
}

}  // namespace

Waveform render_scenes(const Waveform& tx, const std::vector<SceneFrame>& scenes,
                       const SimConfig& cfg, const EchoConfig& echo_cfg) {
  echo_cfg.validate();
  if (scenes.empty()) throw empty_input_error("render_scenes: no scenes");
  const int frame_len = echo_cfg.frame_len;
  if (tx.samples.size() == 0 || tx.samples.size() % frame_len != 0)
    throw parameter_error("render_scenes: tx length must be a multiple of frame_len");
  const Eigen::Index n_frames = tx.samples.size() / frame_len;
  if (static_cast<Eigen::Index>(scenes.size()) != n_frames)
    throw parameter_error("render_scenes: one scene per tx frame required");
  if (cfg.noise_std < 0) throw parameter_error("render_scenes: negative noise_std");

  const double samples_per_mm = echo_cfg.sample_rate / echo_cfg.speed_of_sound;
  Waveform rx;
  rx.sample_rate = tx.sample_rate;
  rx.start_time = tx.start_time;
  rx.samples.resize(tx.samples.size());

  parallel_for(n_frames, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const SceneFrame& scene = scenes[static_cast<std::size_t>(i)];
      const Eigen::VectorXcd tx_spec =
          fft_forward(tx.samples.segment(i * frame_len, frame_len));
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(frame_len);
      const double direct_mm = (scene.speaker - scene.mic).norm();
      if (cfg.direct_path_gain > 0)
        add_delayed(acc, tx_spec, direct_mm * samples_per_mm, cfg.direct_path_gain);
      for (const auto& r : scene.reflectors) {
        const double d_spk = (r - scene.speaker).norm();
        const double d_mic = (r - scene.mic).norm();
        add_delayed(acc, tx_spec, (d_spk + d_mic) * samples_per_mm,
                    reflector_gain(d_spk, d_mic, cfg));
      }
      Eigen::VectorXd frame = fft_inverse_real(acc);
      if (cfg.noise_std > 0) {
        Rng rng(splitmix64(cfg.seed ^ static_cast<std::uint64_t>(i)));
        for (int s = 0; s < frame_len; ++s)
          frame[s] += cfg.noise_std * rng.gaussian();
      }
      rx.samples.segment(i * frame_len, frame_len) = frame;
    }
  });
  return rx;
}

Waveform render_received(const Waveform& tx, const PoseSequence& seq,
                         const RingPlacement& placement, const SimConfig& cfg,
                         const EchoConfig& echo_cfg) {
  if (seq.poses.empty()) throw empty_input_error("render_received: empty pose sequence");
  for (std::size_t i = 1; i < seq.poses.size(); ++i)
    if (seq.poses[i].timestamp <= seq.poses[i - 1].timestamp)
      throw parameter_error("render_received: pose timestamps must increase");

  const int frame_len = echo_cfg.frame_len;
  if (tx.samples.size() == 0 || tx.samples.size() % frame_len != 0)
    throw parameter_error("render_received: tx length must be a multiple of frame_len");
  const Eigen::Index n_frames = tx.samples.size() / frame_len;

  std::vector<SceneFrame> scenes;
  scenes.reserve(static_cast<std::size_t>(n_frames));
  for (Eigen::Index i = 0; i < n_frames; ++i) {
    const double t =
        tx.start_time + static_cast<double>(i * frame_len) / echo_cfg.sample_rate;
    // Nearest pose in time; the earlier one on ties.
    std::size_t best = 0;
    double best_dt = std::abs(seq.poses[0].timestamp - t);
    for (std::size_t p = 1; p < seq.poses.size(); ++p) {
      const double dt = std::abs(seq.poses[p].timestamp - t);
      if (dt < best_dt) {
        best = p;
        best_dt = dt;
      }
    }
    const auto sm = ring_position(seq.poses[best], placement);
    scenes.push_back({sm.speaker, sm.mic, hand_reflectors(seq.poses[best])});
  }
  return render_scenes(tx, scenes, cfg, echo_cfg);
}

PeakPixel expected_peak_pixel(const Eigen::Vector3d& reflector,
                              const Eigen::Vector3d& speaker,
                              const Eigen::Vector3d& mic, const EchoConfig& echo_cfg) {
  const double path = (reflector - speaker).norm() + (reflector - mic).norm();
  const double beyond_direct = path - (speaker - mic).norm();
  const int pixel = static_cast<int>(std::llround(
      beyond_direct * echo_cfg.sample_rate / echo_cfg.speed_of_sound));
  return {pixel, pixel < echo_cfg.crop_len};
}

std::vector<PeakPixel> expected_peak_pixels(const HandPose& pose,
                                            const RingPlacement& placement,
                                            const EchoConfig& echo_cfg) {
  const auto sm = ring_position(pose, placement);
  std::vector<PeakPixel> out;
  for (const auto& r : hand_reflectors(pose))
    out.push_back(expected_peak_pixel(r, sm.speaker, sm.mic, echo_cfg));
  return out;
}

}  // namespace rap
