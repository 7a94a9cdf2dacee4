#include "rap/hand.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "rap/errors.hpp"

namespace rap {

using json = nlohmann::json;

PalmBasis reference_basis() {
  return {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ(),
          Eigen::Vector3d::UnitY()};
}

PalmBasis palm_basis(const RelativeHandPose& p) {
  const Eigen::Vector3d index_mcp = p.joint(kIndexMcp);
  const Eigen::Vector3d pinky_mcp = p.joint(kPinkyMcp);
  const Eigen::Vector3d cross = index_mcp.cross(pinky_mcp);
  if (cross.norm() < 1e-6 * index_mcp.norm() * pinky_mcp.norm() ||
      index_mcp.norm() == 0.0 || pinky_mcp.norm() == 0.0)
    throw geometry_error("palm_basis: palm plane is degenerate");
  PalmBasis b;
  b.u = index_mcp.normalized();
  b.n = cross.normalized();
  b.w = b.n.cross(b.u);
  return b;
}

RelativeHandPose to_relative(const HandPose& p) {
  RelativeHandPose rel;
  rel.timestamp = p.timestamp;
  const Eigen::Vector3d wrist = p.joints.col(kWrist);
  for (int j = 1; j < kHandJoints; ++j)
    rel.joints.col(j - 1) = p.joints.col(j) - wrist;
  return rel;
}

RelativeHandPose align_to_reference(const RelativeHandPose& p, const PalmBasis& ref) {
  const Eigen::Matrix3d rotation = ref.matrix() * palm_basis(p).matrix().transpose();
  RelativeHandPose out;
  out.timestamp = p.timestamp;
  out.joints = rotation * p.joints;
  return out;
}

RelativeHandPose normalize_size(const RelativeHandPose& p, double measured_len_mm) {
  if (measured_len_mm <= 0)
    throw parameter_error("normalize_size: measured length must be > 0");
  const double pinky_len = p.joint(kPinkyMcp).norm();
  if (pinky_len <= 0)
    throw geometry_error("normalize_size: wrist-to-pinky-MCP length is zero");
  RelativeHandPose out;
  out.timestamp = p.timestamp;
  out.joints = (measured_len_mm / pinky_len) * p.joints;
  return out;
}

double mpjpe(const RelativeHandPose& pred, const RelativeHandPose& gt) {
  return (pred.joints - gt.joints).colwise().norm().mean();
}

std::array<double, kRelativeJoints> per_joint_errors(const RelativeHandPose& pred,
                                                     const RelativeHandPose& gt) {
  std::array<double, kRelativeJoints> err{};
  for (int j = 0; j < kRelativeJoints; ++j)
    err[static_cast<std::size_t>(j)] = (pred.joints.col(j) - gt.joints.col(j)).norm();
  return err;
}

std::array<double, 5> per_finger_errors(const RelativeHandPose& pred,
                                        const RelativeHandPose& gt) {
  const auto joints = per_joint_errors(pred, gt);
  std::array<double, 5> fingers{};
  for (int f = 0; f < 5; ++f) {
    double sum = 0;
    for (int j = 0; j < 4; ++j) sum += joints[static_cast<std::size_t>(4 * f + j)];
    fingers[static_cast<std::size_t>(f)] = sum / 4.0;
  }
  return fingers;
}

Eigen::Matrix<double, 60, 1> flatten(const RelativeHandPose& p) {
  Eigen::Matrix<double, 60, 1> v;
  for (int j = 0; j < kRelativeJoints; ++j) v.segment<3>(3 * j) = p.joints.col(j);
  return v;
}

RelativeHandPose unflatten(const Eigen::Matrix<double, 60, 1>& coords,
                           double timestamp) {
  RelativeHandPose p;
  p.timestamp = timestamp;
  for (int j = 0; j < kRelativeJoints; ++j) p.joints.col(j) = coords.segment<3>(3 * j);
  return p;
}

namespace {

HandPose pose_from_json(const json& rec, std::size_t line_no) {
  if (!rec.contains("t") || !rec.contains("joints"))
    throw parse_error("pose record needs 't' and 'joints'", line_no);
  const auto& joints = rec["joints"];
  if (!joints.is_array() || joints.size() != kHandJoints)
    throw parse_error("'joints' must hold exactly 21 points", line_no);
  HandPose p;
  p.timestamp = rec["t"].get<double>();
  for (int j = 0; j < kHandJoints; ++j) {
    const auto& pt = joints[static_cast<std::size_t>(j)];
    if (!pt.is_array() || pt.size() != 3)
      throw parse_error("joint entries must be [x,y,z]", line_no);
    for (int a = 0; a < 3; ++a) p.joints(a, j) = pt[static_cast<std::size_t>(a)].get<double>();
  }
  if (!p.joints.allFinite()) throw parse_error("non-finite joint coordinate", line_no);
  return p;
}

}  // namespace

std::vector<HandPose> read_poses_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<HandPose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw parse_error(std::string("bad JSON: ") + e.what(), line_no);
    }
    poses.push_back(pose_from_json(rec, line_no));
  }
  return poses;
}

void write_poses_jsonl(const std::filesystem::path& path,
                       const std::vector<HandPose>& poses) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  for (const auto& p : poses) {
    json joints = json::array();
    for (int j = 0; j < kHandJoints; ++j)
      joints.push_back({p.joints(0, j), p.joints(1, j), p.joints(2, j)});
    out << json{{"t", p.timestamp}, {"joints", joints}}.dump() << "\n";
  }
}

std::vector<HandPose> read_poses_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<HandPose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        fields.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw parse_error("not a number: '" + cell + "'", line_no);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 1 + 3 * kHandJoints)
      throw parse_error("expected 64 columns", line_no);
    HandPose p;
    p.timestamp = fields[0];
    for (int j = 0; j < kHandJoints; ++j)
      for (int a = 0; a < 3; ++a)
        p.joints(a, j) = fields[static_cast<std::size_t>(1 + 3 * j + a)];
    poses.push_back(p);
  }
  return poses;
}

void write_poses_csv(const std::filesystem::path& path,
                     const std::vector<HandPose>& poses) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  char buf[64];
  for (const auto& p : poses) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.timestamp);
    out << buf;
    for (int j = 0; j < kHandJoints; ++j)
      for (int a = 0; a < 3; ++a) {
        std::snprintf(buf, sizeof(buf), ",%.17g", p.joints(a, j));
        out << buf;
      }
    out << "\n";
  }
}

}  // namespace rap
