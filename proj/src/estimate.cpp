#include "rap/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rap/errors.hpp"

namespace rap {

using json = nlohmann::json;

KnnModel fit(const std::vector<LabeledWindow>& windows, const KnnConfig& cfg) {
  if (cfg.k < 1) throw parameter_error("knn: k must be >= 1");
  KnnModel model;
  model.cfg_ = cfg;
  if (windows.empty()) return model;  // valid but unusable until refit

  model.kind_ = windows.front().kind;
  const Eigen::Index dim = windows.front().flattened().size();
  model.exemplars_.resize(dim, static_cast<Eigen::Index>(windows.size()));
  model.pose_labels_.resize(60, static_cast<Eigen::Index>(windows.size()));
  model.gesture_labels_.resize(windows.size(), -1);
  model.t_last_.resize(windows.size(), 0.0);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.kind != model.kind_)
      throw parameter_error("knn: mixed label kinds in the training set");
    const Eigen::VectorXf flat = w.flattened();
    if (flat.size() != dim) throw parameter_error("knn: inconsistent window shapes");
    model.exemplars_.col(static_cast<Eigen::Index>(i)) = flat;
    model.pose_labels_.col(static_cast<Eigen::Index>(i)) = w.pose_label;
    model.gesture_labels_[i] = w.gesture_label;
    model.t_last_[i] = w.t_last;
  }
  model.exemplar_count_ = windows.size();
  return model;
}

std::vector<std::pair<float, int>> KnnModel::nearest(const LabeledWindow& w) const {
  if (exemplar_count_ == 0) throw state_error("knn: model has no exemplars");
  if (static_cast<int>(exemplar_count_) < cfg_.k)
    throw state_error("knn: fewer exemplars than k");
  const Eigen::VectorXf query = w.flattened();
  if (query.size() != exemplars_.rows())
    throw parameter_error("knn: query window shape does not match the model");

  const Eigen::Index n = exemplars_.cols();
  std::vector<std::pair<float, int>> scored(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    scored[static_cast<std::size_t>(i)] = {(exemplars_.col(i) - query).squaredNorm(),
                                           static_cast<int>(i)};
  // Stable under distance ties: lower index wins.
  std::partial_sort(scored.begin(), scored.begin() + cfg_.k, scored.end());
  scored.resize(static_cast<std::size_t>(cfg_.k));
  for (auto& [d2, idx] : scored) d2 = std::sqrt(d2);
  return scored;
}

RelativeHandPose predict_pose(const KnnModel& model, const LabeledWindow& w) {
  if (model.kind_ != LabelKind::Pose)
    throw state_error("knn: model was fitted on gesture labels");
  const auto neighbors = model.nearest(w);
  Eigen::Matrix<double, 60, 1> mean = Eigen::Matrix<double, 60, 1>::Zero();
  if (model.cfg_.distance_weighted) {
    double total = 0.0;
    for (const auto& [dist, idx] : neighbors) {
      const double weight = 1.0 / (static_cast<double>(dist) + 1e-9);
      mean += weight * model.pose_labels_.col(idx).cast<double>();
      total += weight;
    }
    mean /= total;
  } else {
    for (const auto& [dist, idx] : neighbors)
      mean += model.pose_labels_.col(idx).cast<double>();
    mean /= static_cast<double>(neighbors.size());
  }
  return unflatten(mean, w.t_last);
}

int predict_gesture(const KnnModel& model, const LabeledWindow& w) {
  if (model.kind_ != LabelKind::Gesture)
    throw state_error("knn: model was fitted on pose labels");
  const auto neighbors = model.nearest(w);
  std::map<int, std::pair<int, double>> votes;  // class -> (count, summed distance)
  for (const auto& [dist, idx] : neighbors) {
    auto& [count, total] = votes[model.gesture_labels_[static_cast<std::size_t>(idx)]];
    ++count;
    total += dist;
  }
  int best_class = -1;
  int best_count = -1;
  double best_total = 0.0;
  for (const auto& [cls, tally] : votes) {
    const auto& [count, total] = tally;
    const bool wins = count > best_count ||
                      (count == best_count && total < best_total);
    if (wins) {  // map order makes the final tie-break the smallest class id
      best_class = cls;
      best_count = count;
      best_total = total;
    }
  }
  return best_class;
}

EvalReport evaluate_pose(const std::vector<RelativeHandPose>& preds,
                         const std::vector<RelativeHandPose>& gts) {
  if (preds.size() != gts.size())
    throw parameter_error("evaluate_pose: prediction/ground-truth length mismatch");
  EvalReport report;
  report.kind = LabelKind::Pose;
  report.count = static_cast<int>(preds.size());
  if (preds.empty()) return report;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    report.mpjpe_mm += mpjpe(preds[i], gts[i]);
    const auto joints = per_joint_errors(preds[i], gts[i]);
    for (int j = 0; j < kRelativeJoints; ++j)
      report.per_joint_mm[static_cast<std::size_t>(j)] += joints[static_cast<std::size_t>(j)];
    const auto fingers = per_finger_errors(preds[i], gts[i]);
    for (int f = 0; f < 5; ++f)
      report.per_finger_mm[static_cast<std::size_t>(f)] += fingers[static_cast<std::size_t>(f)];
  }
  const double n = static_cast<double>(preds.size());
  report.mpjpe_mm /= n;
  for (auto& v : report.per_joint_mm) v /= n;
  for (auto& v : report.per_finger_mm) v /= n;
  return report;
}

EvalReport evaluate_gesture(const std::vector<int>& preds, const std::vector<int>& gts,
                            int n_classes) {
  if (preds.size() != gts.size())
    throw parameter_error("evaluate_gesture: prediction/ground-truth length mismatch");
  if (n_classes < 1) throw parameter_error("evaluate_gesture: n_classes must be >= 1");
  EvalReport report;
  report.kind = LabelKind::Gesture;
  report.count = static_cast<int>(preds.size());
  report.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (gts[i] < 0 || gts[i] >= n_classes || preds[i] < 0 || preds[i] >= n_classes)
      throw parameter_error("evaluate_gesture: class id out of range");
    report.confusion(gts[i], preds[i]) += 1;
  }
  if (report.count > 0)
    report.accuracy =
        static_cast<double>(report.confusion.trace()) / report.count;
  double f1_sum = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    const double tp = report.confusion(c, c);
    const double fp = report.confusion.col(c).sum() - tp;
    const double fn = report.confusion.row(c).sum() - tp;
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    f1_sum += precision + recall > 0 ? 2 * precision * recall / (precision + recall)
                                     : 0.0;
  }
  report.macro_f1 = f1_sum / n_classes;
  return report;
}

std::string EvalReport::to_json() const {
  json doc;
  doc["count"] = count;
  if (kind == LabelKind::Pose) {
    doc["mpjpe_mm"] = mpjpe_mm;
    doc["per_joint_mm"] = per_joint_mm;
    doc["per_finger_mm"] = per_finger_mm;
  } else {
    doc["accuracy"] = accuracy;
    doc["macro_f1"] = macro_f1;
    json rows = json::array();
    for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < confusion.cols(); ++c) row.push_back(confusion(r, c));
      rows.push_back(row);
    }
    doc["confusion"] = rows;
  }
  return doc.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  if (kind == LabelKind::Pose) {
    out << "instances: " << count << "\n";
    out << "mpjpe_mm:  " << mpjpe_mm << "\n";
    static const char* fingers[5] = {"thumb", "index", "middle", "ring", "pinky"};
    for (int f = 0; f < 5; ++f)
      out << "  " << fingers[f] << ": " << per_finger_mm[static_cast<std::size_t>(f)]
          << " mm\n";
  } else {
    out << "instances: " << count << "\n";
    out << "accuracy:  " << 100.0 * accuracy << " %\n";
    out << "macro-F1:  " << 100.0 * macro_f1 << " %\n";
    out << "confusion (rows = truth):\n";
    for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
      out << "  ";
      for (Eigen::Index c = 0; c < confusion.cols(); ++c)
        out << confusion(r, c) << (c + 1 < confusion.cols() ? " " : "\n");
    }
  }
  return out.str();
}

std::vector<TimedPrediction> import_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<TimedPrediction> preds;
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
    if (!rec.contains("t") || !rec["t"].is_number())
      throw parse_error("prediction record needs a numeric 't'", line_no);
    TimedPrediction p;
    p.t = rec["t"].get<double>();
    const bool has_pose = rec.contains("pose");
    const bool has_gesture = rec.contains("gesture");
    if (has_pose == has_gesture)
      throw parse_error("record must carry exactly one of 'pose' or 'gesture'", line_no);
    if (has_pose) {
      const auto& coords = rec["pose"];
      if (!coords.is_array() || coords.size() != 60)
        throw parse_error("'pose' must hold exactly 60 coordinates", line_no);
      Eigen::Matrix<double, 60, 1> v;
      for (int i = 0; i < 60; ++i) v[i] = coords[static_cast<std::size_t>(i)].get<double>();
      p.pose = v;
    } else {
      if (!rec["gesture"].is_number_integer())
        throw parse_error("'gesture' must be an integer class id", line_no);
      p.gesture = rec["gesture"].get<int>();
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

void export_predictions(const std::filesystem::path& path,
                        const std::vector<TimedPrediction>& preds) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  for (const auto& p : preds) {
    json rec{{"t", p.t}};
    if (p.pose) {
      json coords = json::array();
      for (int i = 0; i < 60; ++i) coords.push_back((*p.pose)[i]);
      rec["pose"] = coords;
    } else if (p.gesture) {
      rec["gesture"] = *p.gesture;
    }
    out << rec.dump() << "\n";
  }
}

std::vector<std::optional<std::size_t>> align_predictions(
    const std::vector<TimedPrediction>& preds, const std::vector<double>& gt_times,
    double frame_period) {
  if (frame_period <= 0)
    throw parameter_error("align_predictions: frame_period must be > 0");
  auto frame_of = [frame_period](double t) {
    return static_cast<std::int64_t>(std::floor(t / frame_period + 1e-9));
  };
  std::vector<std::optional<std::size_t>> out(gt_times.size());
  for (std::size_t g = 0; g < gt_times.size(); ++g) {
    const std::int64_t gt_frame = frame_of(gt_times[g]);
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const std::int64_t pf = frame_of(preds[i].t);
      if (pf <= gt_frame && (!best || pf >= frame_of(preds[*best].t))) best = i;
    }
    out[g] = best;
  }
  return out;
}

}  // namespace rap
