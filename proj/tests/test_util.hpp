#pragma once

#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "rap/hand.hpp"
#include "rap/rng.hpp"

namespace raptest {

/// Direct O(L^2) circular cross-correlation. Oracle for the FFT path; keep
/// independent of the library implementation.
inline Eigen::VectorXd direct_circular_correlation(const Eigen::VectorXd& rx,
                                                   const Eigen::VectorXd& tmpl) {
  const Eigen::Index n = rx.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i) out[k] += rx[(i + k) % n] * tmpl[i];
  return out;
}

inline Eigen::Vector3d random_unit_vector(rap::Rng& rng) {
  Eigen::Vector3d v;
  do {
    for (int i = 0; i < 3; ++i) v[i] = rng.gaussian();
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Eigen::Matrix3d random_rotation(rap::Rng& rng) {
  // Uniform via normalized quaternion.
  Eigen::Vector4d q;
  do {
    for (int i = 0; i < 4; ++i) q[i] = rng.gaussian();
  } while (q.norm() < 1e-6);
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

/// Random but hand-plausible pose: joints scattered in a 180 mm box in front
/// of the wrist, palm plane kept non-degenerate.
inline rap::HandPose random_pose(rap::Rng& rng) {
  rap::HandPose p;
  p.joints.col(0).setZero();
  for (int j = 1; j < rap::kHandJoints; ++j) {
    p.joints(0, j) = rng.uniform(20.0, 180.0);
    p.joints(1, j) = rng.uniform(-80.0, 80.0);
    p.joints(2, j) = rng.uniform(-60.0, 60.0);
  }
  // Anchor the palm: keep index/pinky MCP well separated.
  p.joints.col(5) = Eigen::Vector3d(80 + rng.uniform(-5, 5), 25 + rng.uniform(-3, 3),
                                    rng.uniform(-5, 5));
  p.joints.col(17) = Eigen::Vector3d(70 + rng.uniform(-5, 5), -35 + rng.uniform(-3, 3),
                                     rng.uniform(-5, 5));
  return p;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("rap_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace raptest
