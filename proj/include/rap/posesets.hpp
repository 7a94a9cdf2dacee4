#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rap/sim.hpp"

namespace rap {

// Synthetic pose data. The hands here are generated from a canonical
// skeleton with per-finger curl/spread tables; they are plausible, not
// captured. Shipped as JSON under data/ for external tooling and resolvable
// by name from scenario files.

struct NamedPose {
  std::string name;
  HandPose pose;
};

/// Piecewise-linear pose schedule; keyframe timestamps strictly increase.
struct PoseTrack {
  std::vector<HandPose> keyframes;
};

/// A micro-gesture class: a short keyframe track performed once.
struct GestureClass {
  int id = 0;
  std::string name;
  PoseTrack track;
};

const std::vector<std::string>& builtin_set_names();  // pose + gesture sets

/// "asl-digits" (10 poses) or "study2-20poses" (20 poses).
std::vector<NamedPose> builtin_pose_set(const std::string& name);

/// "micro-7gestures": 7 classes, id 0 = "rest".
std::vector<GestureClass> builtin_gesture_set();

/// id -> name map for the gesture classes.
std::map<int, std::string> gesture_label_map();

HandPose lerp_pose(const HandPose& a, const HandPose& b, double alpha);

double track_duration(const PoseTrack& track);
HandPose sample_track_at(const PoseTrack& track, double t);  // clamped lerp

/// Sample a track at a fixed rate. duration < 0 samples the whole track.
PoseSequence sample_track(const PoseTrack& track, double rate, double start_time = 0.0,
                          double duration = -1.0);

/// Visit each pose in order: transition_s of interpolation into the pose,
/// then hold_s of stillness. The first pose starts without a transition.
PoseTrack hold_track(const std::vector<NamedPose>& poses, double hold_s,
                     double transition_s);

// Data-file round trip for the synthetic sets.
void write_pose_set_json(const std::filesystem::path& path, const std::string& set_name,
                         const std::vector<NamedPose>& poses);
std::vector<NamedPose> load_pose_set_json(const std::filesystem::path& path);
void write_gesture_set_json(const std::filesystem::path& path,
                            const std::vector<GestureClass>& classes);
std::vector<GestureClass> load_gesture_set_json(const std::filesystem::path& path);
void write_gesture_label_map(const std::filesystem::path& path);

}  // namespace rap
