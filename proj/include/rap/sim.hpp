#pragma once

#include <cstdint>
#include <vector>

#include "rap/echo.hpp"
#include "rap/hand.hpp"
#include "rap/waveform.hpp"

namespace rap {

enum class Finger { Thumb, Index, Middle, Ring, Pinky };

Finger finger_from_name(const std::string& name);
std::string finger_name(Finger f);

/// Where the ring sits on the hand. The speaker and microphone offsets are in
/// the ring's local frame (e1 = circumference tangent, e2 = radial, e3 = finger
/// axis); the production geometry keeps them 5.4 mm apart along the
/// circumference. validate_placement enforces that separation; test scenes may
/// build arbitrary (e.g. co-located) offsets directly.
struct RingPlacement {
  Finger worn_finger = Finger::Middle;
  double along_segment = 0.5;  // 0 = MCP, 1 = PIP
  Eigen::Vector3d speaker_offset{2.7, 0.0, 0.0};  // mm
  Eigen::Vector3d mic_offset{-2.7, 0.0, 0.0};
};

double speaker_mic_separation(const RingPlacement& placement);
void validate_placement(const RingPlacement& placement);  // 5.4 mm +- 1e-6

/// Point-reflector rendering knobs. The attenuation law is
/// 1 / (d_spk * d_mic)^(exponent/2) with distances in units of 100 mm,
/// clamped to <= 1. Purely an artifact choice; nothing here is measured.
struct SimConfig {
  double direct_path_gain = 0.5;
  double attenuation_exponent = 2.0;
  double reflector_coefficient = 1.0;
  double noise_std = 0.005;   // amplitude units
  std::uint64_t seed = 0;
};

/// Time-ordered pose stream; timestamps must be strictly increasing.
struct PoseSequence {
  std::vector<HandPose> poses;
  double rate = 50000.0 / 600.0;  // frames per second
};

struct SpeakerMic {
  Eigen::Vector3d speaker;
  Eigen::Vector3d mic;
};

/// Ring center interpolated along the worn finger's proximal segment; the
/// speaker/mic offsets ride the segment's local frame.
SpeakerMic ring_position(const HandPose& pose, const RingPlacement& placement);

/// Reflection points of a pose: the 21 joints plus the palm centroid
/// (mean of joints 0, 5, 9, 13, 17).
std::vector<Eigen::Vector3d> hand_reflectors(const HandPose& pose);

/// Geometry for one 12 ms frame, decoupled from hand poses so oracle scenes
/// (single reflector, co-located speaker/mic) can be rendered directly.
struct SceneFrame {
  Eigen::Vector3d speaker;
  Eigen::Vector3d mic;
  std::vector<Eigen::Vector3d> reflectors;
};

/// Render the received waveform for per-frame scenes. Per frame:
///   rx = direct_gain * delay(tx, |spk-mic|/c)
///      + sum_r a_r * delay(tx, (d_spk,r + d_mic,r)/c)
///      + gaussian noise.
/// Delays are fractional-sample (frequency-domain phase shift), circular
/// within the frame. The noise stream is seeded per frame from
/// (seed, frame_index), so parallel and serial renders are bit-identical.
Waveform render_scenes(const Waveform& tx, const std::vector<SceneFrame>& scenes,
                       const SimConfig& cfg, const EchoConfig& echo_cfg);

/// Pose-driven rendering: each tx frame takes the pose nearest in time
/// (earlier pose on ties), builds the scene from ring_position and
/// hand_reflectors, then renders as above.
Waveform render_received(const Waveform& tx, const PoseSequence& seq,
                         const RingPlacement& placement, const SimConfig& cfg,
                         const EchoConfig& echo_cfg);

struct PeakPixel {
  int pixel;
  bool in_crop;
};

/// Arithmetic oracle: pixel = round((d_spk + d_mic - d_direct) * f_s / c),
/// i.e. echo path length beyond the direct path, one entry per reflector.
std::vector<PeakPixel> expected_peak_pixels(const HandPose& pose,
                                            const RingPlacement& placement,
                                            const EchoConfig& echo_cfg);

PeakPixel expected_peak_pixel(const Eigen::Vector3d& reflector,
                              const Eigen::Vector3d& speaker,
                              const Eigen::Vector3d& mic, const EchoConfig& echo_cfg);

}  // namespace rap
