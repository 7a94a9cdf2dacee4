#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <vector>

namespace rap {

inline constexpr int kHandJoints = 21;
inline constexpr int kRelativeJoints = 20;

// MediaPipe-style keypoint indices: 0 wrist, 1-4 thumb, 5-8 index,
// 9-12 middle, 13-16 ring, 17-20 pinky (MCP..tip per finger).
inline constexpr int kWrist = 0;
inline constexpr int kIndexMcp = 5;
inline constexpr int kPinkyMcp = 17;

/// 21 labeled joints in millimetres.
struct HandPose {
  Eigen::Matrix<double, 3, kHandJoints> joints;
  double timestamp = 0.0;  // seconds
};

/// Joints 1..20 after subtracting the wrist. Column i holds joint i+1.
struct RelativeHandPose {
  Eigen::Matrix<double, 3, kRelativeJoints> joints;
  double timestamp = 0.0;

  Eigen::Vector3d joint(int index) const { return joints.col(index - 1); }
};

/// Orthonormal right-handed palm triad: u along wrist->index-MCP, n the palm
/// normal, w = n x u.
struct PalmBasis {
  Eigen::Vector3d u, n, w;
  Eigen::Matrix3d matrix() const {  // columns (u, w, n)
    Eigen::Matrix3d m;
    m.col(0) = u;
    m.col(1) = w;
    m.col(2) = n;
    return m;
  }
};

/// Fixed reference orientation: u = +x, n = +z (palm facing the camera).
PalmBasis reference_basis();

/// Palm triad of a wrist-relative pose; throws geometry_error when joints 5
/// and 17 are (near-)collinear with the origin.
PalmBasis palm_basis(const RelativeHandPose& p);

RelativeHandPose to_relative(const HandPose& p);

/// Rigid rotation mapping the pose's palm triad onto ref. Preserves all
/// pairwise joint distances.
RelativeHandPose align_to_reference(const RelativeHandPose& p, const PalmBasis& ref);

/// Uniform scale so that |joint 17| equals the physically measured
/// wrist-to-pinky-MCP length.
RelativeHandPose normalize_size(const RelativeHandPose& p, double measured_len_mm);

/// Mean Euclidean distance over the 20 wrist-relative joints, in mm.
double mpjpe(const RelativeHandPose& pred, const RelativeHandPose& gt);

std::array<double, kRelativeJoints> per_joint_errors(const RelativeHandPose& pred,
                                                     const RelativeHandPose& gt);

/// Finger order: thumb, index, middle, ring, pinky (4 joints each).
std::array<double, 5> per_finger_errors(const RelativeHandPose& pred,
                                        const RelativeHandPose& gt);

/// Flattened 60-coordinate label, joint-major (x1,y1,z1, x2,y2,z2, ...).
Eigen::Matrix<double, 60, 1> flatten(const RelativeHandPose& p);
RelativeHandPose unflatten(const Eigen::Matrix<double, 60, 1>& coords,
                           double timestamp = 0.0);

// Keypoint ingestion. JSON-lines: {"t": seconds, "joints": [[x,y,z] x 21]} in
// mm; CSV: 64 columns, t followed by 63 coordinates in joint order.
std::vector<HandPose> read_poses_jsonl(const std::filesystem::path& path);
void write_poses_jsonl(const std::filesystem::path& path,
                       const std::vector<HandPose>& poses);
std::vector<HandPose> read_poses_csv(const std::filesystem::path& path);
void write_poses_csv(const std::filesystem::path& path,
                     const std::vector<HandPose>& poses);

}  // namespace rap
