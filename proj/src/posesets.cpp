#include "rap/posesets.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rap/errors.hpp"

namespace rap {

using json = nlohmann::json;

namespace {

constexpr double kDeg = M_PI / 180.0;

// Canonical right hand, millimetres. Palm in the z=0 plane, fingers along
// +x, thumb side +y. Wrist at the origin.
struct FingerShape {
  Eigen::Vector3d mcp;       // base joint position
  Eigen::Vector3d base_dir;  // straightened direction
  double lengths[3];         // proximal, middle, distal
};

const FingerShape kThumb{{25, 22, 0}, Eigen::Vector3d{0.55, 0.84, 0}.normalized(), {38, 32, 25}};
const FingerShape kIndex{{88, 24, 0}, Eigen::Vector3d{0.97, 0.24, 0}.normalized(), {40, 24, 18}};
const FingerShape kMiddle{{90, 1, 0}, Eigen::Vector3d{1.0, 0.01, 0}.normalized(), {45, 28, 20}};
const FingerShape kRing{{84, -20, 0}, Eigen::Vector3d{0.97, -0.24, 0}.normalized(), {42, 26, 19}};
const FingerShape kPinky{{76, -38, 0}, Eigen::Vector3d{0.92, -0.40, 0}.normalized(), {32, 20, 16}};

struct FingerAngles {
  double curl[3] = {0, 0, 0};  // per-joint flexion, degrees
  double spread = 0;           // abduction about the palm normal, degrees
};

struct PoseAngles {
  FingerAngles thumb, index, middle, ring, pinky;
};

Eigen::Vector3d rotate(const Eigen::Vector3d& v, const Eigen::Vector3d& axis,
                       double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis) * v;
}

// Chain a finger from its base. Flexion tips successive segments toward -z;
// the thumb's flexion axis is tilted so that it also sweeps across the palm.
void chain_finger(Eigen::Matrix<double, 3, kHandJoints>& joints, int first_joint,
                  const FingerShape& shape, const FingerAngles& angles,
                  bool is_thumb) {
  const Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d dir = rotate(shape.base_dir, normal, angles.spread * kDeg);
  Eigen::Vector3d flex_axis = normal.cross(dir).normalized();
  if (is_thumb) flex_axis = (flex_axis + 1.2 * normal).normalized();
  Eigen::Vector3d p = shape.mcp;
  joints.col(first_joint) = p;
  for (int s = 0; s < 3; ++s) {
    dir = rotate(dir, flex_axis, -angles.curl[s] * kDeg);
    p += shape.lengths[s] * dir;
    joints.col(first_joint + s + 1) = p;
  }
}

HandPose make_hand(const PoseAngles& a) {
  HandPose pose;
  pose.joints.col(kWrist).setZero();
  chain_finger(pose.joints, 1, kThumb, a.thumb, true);
  chain_finger(pose.joints, 5, kIndex, a.index, false);
  chain_finger(pose.joints, 9, kMiddle, a.middle, false);
  chain_finger(pose.joints, 13, kRing, a.ring, false);
  chain_finger(pose.joints, 17, kPinky, a.pinky, false);
  return pose;
}

FingerAngles straight(double spread = 0) { return {{0, 0, 0}, spread}; }
FingerAngles curled(double m, double p, double d, double spread = 0) {
  return {{m, p, d}, spread};
}

const FingerAngles kFullCurl = curled(85, 95, 50);
const FingerAngles kHalfCurl = curled(45, 55, 30);
const FingerAngles kThumbFold = curled(55, 45, 25, -20);
const FingerAngles kThumbHalf = curled(35, 30, 15, -8);

PoseAngles open_hand() {
  PoseAngles a;
  a.thumb = straight(10);
  a.index = straight(4);
  a.ring = straight(-3);
  a.pinky = straight(-6);
  return a;
}

std::vector<std::pair<std::string, PoseAngles>> pose_table() {
  std::vector<std::pair<std::string, PoseAngles>> table;
  auto add = [&](const std::string& name, PoseAngles a) { table.emplace_back(name, a); };

  PoseAngles asl0 = open_hand();
  asl0.thumb = kThumbHalf;
  asl0.index = asl0.middle = asl0.ring = asl0.pinky = curled(40, 50, 35);
  add("asl0", asl0);

  PoseAngles asl1 = open_hand();
  asl1.thumb = kThumbFold;
  asl1.middle = asl1.ring = asl1.pinky = kFullCurl;
  add("asl1", asl1);

  PoseAngles asl2 = asl1;
  asl2.middle = straight(-6);
  add("asl2", asl2);

  PoseAngles asl3 = asl2;
  asl3.thumb = straight(18);
  add("asl3", asl3);

  PoseAngles asl4 = open_hand();
  asl4.thumb = kThumbFold;
  add("asl4", asl4);

  add("asl5", open_hand());

  PoseAngles asl6 = open_hand();
  asl6.pinky = curled(55, 65, 40);
  asl6.thumb = kThumbHalf;
  add("asl6", asl6);

  PoseAngles asl7 = open_hand();
  asl7.ring = curled(55, 65, 40);
  asl7.thumb = kThumbHalf;
  add("asl7", asl7);

  PoseAngles asl8 = open_hand();
  asl8.middle = curled(55, 65, 40);
  asl8.thumb = kThumbHalf;
  add("asl8", asl8);

  PoseAngles asl9 = open_hand();
  asl9.index = curled(55, 65, 40);
  asl9.thumb = kThumbHalf;
  add("asl9", asl9);

  PoseAngles fist;
  fist.thumb = curled(60, 50, 30, -15);
  fist.index = fist.middle = fist.ring = fist.pinky = kFullCurl;
  add("fist", fist);

  PoseAngles thumb_up = fist;
  thumb_up.thumb = straight(25);
  add("thumb-up", thumb_up);

  PoseAngles shaka = fist;
  shaka.thumb = straight(30);
  shaka.pinky = straight(-12);
  add("shaka", shaka);

  PoseAngles shoot = fist;
  shoot.thumb = straight(22);
  shoot.index = straight(4);
  add("shoot", shoot);

  PoseAngles love = fist;
  love.thumb = straight(25);
  love.index = straight(6);
  love.pinky = straight(-10);
  add("i-love-u", love);

  PoseAngles ibent = open_hand();
  ibent.index = kHalfCurl;
  add("i-bent", ibent);

  PoseAngles mbent = open_hand();
  mbent.middle = kHalfCurl;
  add("m-bent", mbent);

  PoseAngles rbent = open_hand();
  rbent.ring = kHalfCurl;
  add("r-bent", rbent);

  PoseAngles pbent = open_hand();
  pbent.pinky = kHalfCurl;
  add("p-bent", pbent);

  PoseAngles claw;
  claw.thumb = kThumbHalf;
  claw.index = claw.middle = claw.ring = claw.pinky = curled(35, 45, 40);
  add("claw", claw);

  return table;
}

// Thumb-to-index micro-gesture building blocks. The thumb moves; the other
// fingers stay relaxed.
PoseAngles micro_rest() {
  PoseAngles a = open_hand();
  a.thumb = curled(22, 18, 10, -4);
  a.index = curled(12, 14, 8);
  a.middle = a.ring = a.pinky = curled(25, 30, 18);
  return a;
}

PoseAngles micro_touch(double along) {
  // along 0 = index base, 1 = index tip.
  PoseAngles a = micro_rest();
  a.thumb = curled(40 - 14 * along, 34 - 10 * along, 18, -14 + 20 * along);
  return a;
}

PoseAngles micro_lift() {
  PoseAngles a = micro_rest();
  a.thumb = curled(8, 6, 4, 6);
  return a;
}

HandPose at(const PoseAngles& a, double t) {
  HandPose p = make_hand(a);
  p.timestamp = t;
  return p;
}

}  // namespace

const std::vector<std::string>& builtin_set_names() {
  static const std::vector<std::string> names{"asl-digits", "study2-20poses",
                                              "micro-7gestures"};
  return names;
}

std::vector<NamedPose> builtin_pose_set(const std::string& name) {
  const auto table = pose_table();
  std::vector<NamedPose> out;
  if (name == "asl-digits") {
    for (const auto& [pose_name, angles] : table)
      if (pose_name.rfind("asl", 0) == 0) out.push_back({pose_name, make_hand(angles)});
    return out;
  }
  if (name == "study2-20poses") {
    for (const auto& [pose_name, angles] : table)
      out.push_back({pose_name, make_hand(angles)});
    return out;
  }
  throw parameter_error("unknown pose set: " + name);
}

std::vector<GestureClass> builtin_gesture_set() {
  std::vector<GestureClass> classes;
  auto add = [&](int id, const std::string& name, std::vector<HandPose> keyframes) {
    classes.push_back({id, name, PoseTrack{std::move(keyframes)}});
  };
  const PoseAngles rest = micro_rest();

  add(0, "rest", {at(rest, 0.0), at(rest, 2.0)});
  add(1, "tap",
      {at(rest, 0.0), at(micro_touch(0.5), 0.5), at(rest, 0.9), at(rest, 2.0)});
  add(2, "double-tap",
      {at(rest, 0.0), at(micro_touch(0.5), 0.35), at(micro_lift(), 0.7),
       at(micro_touch(0.5), 1.05), at(rest, 1.4), at(rest, 2.0)});
  add(3, "swipe-forward",
      {at(rest, 0.0), at(micro_touch(0.0), 0.4), at(micro_touch(1.0), 1.2),
       at(rest, 1.7), at(rest, 2.0)});
  add(4, "swipe-backward",
      {at(rest, 0.0), at(micro_touch(1.0), 0.4), at(micro_touch(0.0), 1.2),
       at(rest, 1.7), at(rest, 2.0)});
  add(5, "pinch-hold",
      {at(rest, 0.0), at(micro_touch(0.8), 0.5), at(micro_touch(0.8), 1.5),
       at(rest, 2.0)});
  add(6, "circle-rub",
      {at(rest, 0.0), at(micro_touch(0.2), 0.4), at(micro_lift(), 0.8),
       at(micro_touch(0.9), 1.2), at(micro_touch(0.2), 1.6), at(rest, 2.0)});
  return classes;
}

std::map<int, std::string> gesture_label_map() {
  std::map<int, std::string> m;
  for (const auto& g : builtin_gesture_set()) m[g.id] = g.name;
  return m;
}

HandPose lerp_pose(const HandPose& a, const HandPose& b, double alpha) {
  HandPose out;
  out.joints = (1.0 - alpha) * a.joints + alpha * b.joints;
  out.timestamp = (1.0 - alpha) * a.timestamp + alpha * b.timestamp;
  return out;
}

double track_duration(const PoseTrack& track) {
  if (track.keyframes.empty()) return 0.0;
  return track.keyframes.back().timestamp - track.keyframes.front().timestamp;
}

HandPose sample_track_at(const PoseTrack& track, double t) {
  if (track.keyframes.empty())
    throw empty_input_error("sample_track_at: track has no keyframes");
  const auto& kf = track.keyframes;
  if (t <= kf.front().timestamp) return kf.front();
  if (t >= kf.back().timestamp) return kf.back();
  std::size_t hi = 1;
  while (kf[hi].timestamp < t) ++hi;
  const auto& a = kf[hi - 1];
  const auto& b = kf[hi];
  const double span = b.timestamp - a.timestamp;
  const double alpha = span > 0 ? (t - a.timestamp) / span : 0.0;
  HandPose out = lerp_pose(a, b, alpha);
  out.timestamp = t;
  return out;
}

PoseSequence sample_track(const PoseTrack& track, double rate, double start_time,
                          double duration) {
  if (rate <= 0) throw parameter_error("sample_track: rate must be > 0");
  if (duration < 0) duration = track_duration(track);
  const auto n = static_cast<std::int64_t>(std::floor(duration * rate)) + 1;
  PoseSequence seq;
  seq.rate = rate;
  seq.poses.reserve(static_cast<std::size_t>(n));
  const double t0 = track.keyframes.empty() ? 0.0 : track.keyframes.front().timestamp;
  for (std::int64_t k = 0; k < n; ++k) {
    const double offset = static_cast<double>(k) / rate;
    HandPose p = sample_track_at(track, t0 + offset);
    p.timestamp = start_time + offset;
    seq.poses.push_back(std::move(p));
  }
  return seq;
}

PoseTrack hold_track(const std::vector<NamedPose>& poses, double hold_s,
                     double transition_s) {
  if (poses.empty()) throw empty_input_error("hold_track: no poses");
  if (hold_s <= 0 || transition_s < 0)
    throw parameter_error("hold_track: need hold_s > 0 and transition_s >= 0");
  PoseTrack track;
  double t = 0.0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (i > 0) t += transition_s;  // linear move into the pose
    HandPose enter = poses[i].pose;
    enter.timestamp = t;
    track.keyframes.push_back(enter);
    t += hold_s;
    HandPose leave = poses[i].pose;
    leave.timestamp = t;
    track.keyframes.push_back(leave);
  }
  return track;
}

namespace {

json joints_to_json(const HandPose& p) {
  json joints = json::array();
  for (int j = 0; j < kHandJoints; ++j)
    joints.push_back({p.joints(0, j), p.joints(1, j), p.joints(2, j)});
  return joints;
}

HandPose joints_from_json(const json& joints, double t) {
  if (!joints.is_array() || joints.size() != kHandJoints)
    throw parameter_error("pose set: 'joints' must hold 21 points");
  HandPose p;
  p.timestamp = t;
  for (int j = 0; j < kHandJoints; ++j)
    for (int a = 0; a < 3; ++a)
      p.joints(a, j) = joints[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]
                           .get<double>();
  return p;
}

}  // namespace

void write_pose_set_json(const std::filesystem::path& path, const std::string& set_name,
                         const std::vector<NamedPose>& poses) {
  json doc;
  doc["set"] = set_name;
  doc["synthetic"] = true;
  doc["units"] = "mm";
  doc["poses"] = json::array();
  for (const auto& np : poses)
    doc["poses"].push_back({{"name", np.name}, {"joints", joints_to_json(np.pose)}});
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << doc.dump(1) << "\n";
}

std::vector<NamedPose> load_pose_set_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  json doc = json::parse(in, nullptr, true, true);
  std::vector<NamedPose> out;
  for (const auto& entry : doc.at("poses"))
    out.push_back({entry.at("name").get<std::string>(),
                   joints_from_json(entry.at("joints"), 0.0)});
  return out;
}

void write_gesture_set_json(const std::filesystem::path& path,
                            const std::vector<GestureClass>& classes) {
  json doc;
  doc["set"] = "micro-7gestures";
  doc["synthetic"] = true;
  doc["units"] = "mm";
  doc["classes"] = json::array();
  for (const auto& g : classes) {
    json kfs = json::array();
    for (const auto& kf : g.track.keyframes)
      kfs.push_back({{"t", kf.timestamp}, {"joints", joints_to_json(kf)}});
    doc["classes"].push_back({{"id", g.id}, {"name", g.name}, {"keyframes", kfs}});
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << doc.dump(1) << "\n";
}

std::vector<GestureClass> load_gesture_set_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  json doc = json::parse(in, nullptr, true, true);
  std::vector<GestureClass> out;
  for (const auto& entry : doc.at("classes")) {
    GestureClass g;
    g.id = entry.at("id").get<int>();
    g.name = entry.at("name").get<std::string>();
    for (const auto& kf : entry.at("keyframes"))
      g.track.keyframes.push_back(
          joints_from_json(kf.at("joints"), kf.at("t").get<double>()));
    out.push_back(std::move(g));
  }
  return out;
}

void write_gesture_label_map(const std::filesystem::path& path) {
  json doc;
  for (const auto& [id, name] : gesture_label_map()) doc[std::to_string(id)] = name;
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << doc.dump(1) << "\n";
}

}  // namespace rap
