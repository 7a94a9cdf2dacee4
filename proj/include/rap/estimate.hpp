#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rap/dataset.hpp"

namespace rap {

/// k-nearest-neighbor baseline over flattened normalized windows, Euclidean
/// distance. Stands in for a learned regressor/classifier with the same I/O
/// contract; externally trained models are scored via import_predictions.
struct KnnConfig {
  int k = 3;
  bool distance_weighted = false;  // 1/(d + eps) weighting for pose queries
};

class KnnModel {
 public:
  KnnModel() = default;

  int exemplar_count() const { return static_cast<int>(exemplar_count_); }
  Eigen::Index dim() const { return exemplars_.rows(); }
  const KnnConfig& config() const { return cfg_; }
  LabelKind kind() const { return kind_; }

  friend KnnModel fit(const std::vector<LabeledWindow>& windows, const KnnConfig& cfg);
  friend RelativeHandPose predict_pose(const KnnModel& model, const LabeledWindow& w);
  friend int predict_gesture(const KnnModel& model, const LabeledWindow& w);

 private:
  std::vector<std::pair<float, int>> nearest(const LabeledWindow& w) const;

  KnnConfig cfg_;
  LabelKind kind_ = LabelKind::Pose;
  Eigen::MatrixXf exemplars_;  // dim x n
  Eigen::Matrix<float, 60, Eigen::Dynamic> pose_labels_;
  std::vector<int> gesture_labels_;
  std::vector<double> t_last_;
  std::size_t exemplar_count_ = 0;
};

KnnModel fit(const std::vector<LabeledWindow>& windows, const KnnConfig& cfg = {});

/// Unweighted (or 1/d-weighted) mean of the k nearest exemplars' labels.
RelativeHandPose predict_pose(const KnnModel& model, const LabeledWindow& w);

/// Majority vote; ties break to the smallest summed distance, then to the
/// smallest class id.
int predict_gesture(const KnnModel& model, const LabeledWindow& w);

/// Aggregated metrics. Pose reports fill the mm fields; gesture reports fill
/// accuracy / macro_f1 / confusion (row = ground truth, column = prediction).
struct EvalReport {
  LabelKind kind = LabelKind::Pose;
  int count = 0;
  double mpjpe_mm = 0.0;
  std::array<double, kRelativeJoints> per_joint_mm{};
  std::array<double, 5> per_finger_mm{};
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  Eigen::MatrixXi confusion;  // n_classes x n_classes

  std::string to_json() const;
  std::string to_table() const;
};

EvalReport evaluate_pose(const std::vector<RelativeHandPose>& preds,
                         const std::vector<RelativeHandPose>& gts);
EvalReport evaluate_gesture(const std::vector<int>& preds, const std::vector<int>& gts,
                            int n_classes = 7);

/// One timestamped prediction: exactly one of pose / gesture is set.
struct TimedPrediction {
  double t = 0.0;
  std::optional<Eigen::Matrix<double, 60, 1>> pose;
  std::optional<int> gesture;
};

// JSON-lines exchange format: {"t": s, "pose": [60 floats]} or
// {"t": s, "gesture": id}. Parse failures name the offending line.
std::vector<TimedPrediction> import_predictions(const std::filesystem::path& path);
void export_predictions(const std::filesystem::path& path,
                        const std::vector<TimedPrediction>& preds);

/// Causal frame-clock alignment, the same rule sync_labels uses: both streams
/// quantize to frame indices (floor(t / frame_period)); each ground-truth
/// instant takes the prediction with the greatest frame index <= its own.
/// Returns one entry per ground-truth time; nullopt when nothing precedes it.
std::vector<std::optional<std::size_t>> align_predictions(
    const std::vector<TimedPrediction>& preds, const std::vector<double>& gt_times,
    double frame_period);

}  // namespace rap
