#pragma once

#include <optional>
#include <vector>

#include "rap/echo.hpp"
#include "rap/hand.hpp"

namespace rap {

/// Sliding-window geometry over an echo profile. Width 100 columns (1.2 s)
/// for pose regression, 160 (1.92 s) for gesture classification.
struct WindowSpec {
  int width = 100;
  int stride = 1;
  int channels = 2;

  void validate() const;
};

enum class LabelKind { Pose, Gesture };

/// One model input: [2 x crop_len x width], channel 0 = differential,
/// channel 1 = original, each channel standardized (see normalize_window).
/// Stored as 32-bit floats, which is also the container precision.
struct LabeledWindow {
  Eigen::MatrixXf differential;  // crop_len x width
  Eigen::MatrixXf original;
  LabelKind kind = LabelKind::Pose;
  Eigen::Matrix<float, 60, 1> pose_label = Eigen::Matrix<float, 60, 1>::Zero();
  int gesture_label = -1;
  double t_last = 0.0;  // timestamp of the last column

  Eigen::Index width() const { return original.cols(); }
  Eigen::Index rows() const { return original.rows(); }

  /// Channel-0-then-channel-1, column-major. The k-NN feature layout.
  Eigen::VectorXf flattened() const;
};

/// Zero-order-hold label sync: column j takes the pose with the greatest
/// timestamp <= column time. Columns before the first pose are unlabeled.
/// Throws sync_error when the time ranges do not overlap at all.
std::vector<std::optional<RelativeHandPose>> sync_labels(
    const EchoProfile& profile, const std::vector<HandPose>& poses);

/// Per-channel standardization: subtract the channel mean, divide by the
/// channel (population) standard deviation; a channel with std < 1e-12 is
/// set to all zeros.
void normalize_window(Eigen::MatrixXd& differential, Eigen::MatrixXd& original);

/// Normalized but unlabeled window ending at column last_col (inclusive).
LabeledWindow window_at(const EchoProfile& profile, const WindowSpec& spec,
                        Eigen::Index last_col);

/// Sliding windows at the given stride. A window's label is its last
/// column's label; windows whose last column is unlabeled are skipped.
std::vector<LabeledWindow> make_windows(
    const EchoProfile& profile,
    const std::vector<std::optional<RelativeHandPose>>& labels,
    const WindowSpec& spec);

/// Classification windows: one per (last_col, class) pair.
std::vector<LabeledWindow> make_gesture_windows(
    const EchoProfile& profile, const WindowSpec& spec,
    const std::vector<std::pair<Eigen::Index, int>>& instances);

/// "RAPD" container: magic, u16 LE version, JSON header, then length-prefixed
/// little-endian float32 records with a CRC32 each. Round trips are bit-exact.
struct Dataset {
  WindowSpec spec;
  LabelKind kind = LabelKind::Pose;
  std::vector<LabeledWindow> windows;
};

void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace rap
