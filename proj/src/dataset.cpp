#include "rap/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rap/crc.hpp"
#include "rap/errors.hpp"

namespace rap {

using json = nlohmann::json;

void WindowSpec::validate() const {
  if (width < 1) throw parameter_error("window: width must be >= 1");
  if (stride < 1) throw parameter_error("window: stride must be >= 1");
  if (channels != 2) throw parameter_error("window: channels must be 2");
}

Eigen::VectorXf LabeledWindow::flattened() const {
  Eigen::VectorXf v(differential.size() + original.size());
  v << Eigen::Map<const Eigen::VectorXf>(differential.data(), differential.size()),
      Eigen::Map<const Eigen::VectorXf>(original.data(), original.size());
  return v;
}

std::vector<std::optional<RelativeHandPose>> sync_labels(
    const EchoProfile& profile, const std::vector<HandPose>& poses) {
  if (poses.empty()) throw empty_input_error("sync_labels: no poses");
  for (std::size_t i = 1; i < poses.size(); ++i)
    if (poses[i].timestamp < poses[i - 1].timestamp)
      throw parameter_error("sync_labels: poses must be time-ordered");
  if (profile.width() == 0) throw empty_input_error("sync_labels: empty profile");

  const double first_col = profile.column_time(0);
  const double last_col = profile.column_time(profile.width() - 1);
  if (poses.front().timestamp > last_col || poses.back().timestamp < first_col)
    throw sync_error("sync_labels: pose and profile time ranges are disjoint");

  std::vector<std::optional<RelativeHandPose>> labels(
      static_cast<std::size_t>(profile.width()));
  std::size_t cursor = 0;
  for (Eigen::Index j = 0; j < profile.width(); ++j) {
    const double t = profile.column_time(j);
    if (poses.front().timestamp > t) continue;  // before the first pose
    while (cursor + 1 < poses.size() && poses[cursor + 1].timestamp <= t) ++cursor;
    labels[static_cast<std::size_t>(j)] = to_relative(poses[cursor]);
  }
  return labels;
}

void normalize_window(Eigen::MatrixXd& differential, Eigen::MatrixXd& original) {
  auto standardize = [](Eigen::MatrixXd& channel) {
    const double mean = channel.mean();
    const double var = (channel.array() - mean).square().mean();
    const double std_dev = std::sqrt(var);
    if (std_dev < 1e-12) {
      channel.setZero();
    } else {
      channel = (channel.array() - mean) / std_dev;
    }
  };
  standardize(differential);
  standardize(original);
}

LabeledWindow window_at(const EchoProfile& profile, const WindowSpec& spec,
                        Eigen::Index last_col) {
  spec.validate();
  const Eigen::Index first = last_col - spec.width + 1;
  if (first < 0 || last_col >= profile.width())
    throw parameter_error("window_at: window exceeds the profile");
  Eigen::MatrixXd diff = profile.differential.block(0, first, profile.rows(), spec.width);
  Eigen::MatrixXd orig = profile.original.block(0, first, profile.rows(), spec.width);
  normalize_window(diff, orig);
  LabeledWindow w;
  w.differential = diff.cast<float>();
  w.original = orig.cast<float>();
  w.t_last = profile.column_time(last_col);
  return w;
}

std::vector<LabeledWindow> make_windows(
    const EchoProfile& profile,
    const std::vector<std::optional<RelativeHandPose>>& labels,
    const WindowSpec& spec) {
  spec.validate();
  if (profile.width() < spec.width)
    throw empty_input_error("make_windows: profile narrower than one window");
  if (static_cast<Eigen::Index>(labels.size()) != profile.width())
    throw parameter_error("make_windows: one label slot per column required");

  std::vector<LabeledWindow> out;
  for (Eigen::Index last = spec.width - 1; last < profile.width(); last += spec.stride) {
    const auto& label = labels[static_cast<std::size_t>(last)];
    if (!label) continue;
    LabeledWindow w = window_at(profile, spec, last);
    w.kind = LabelKind::Pose;
    w.pose_label = flatten(*label).cast<float>();
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<LabeledWindow> make_gesture_windows(
    const EchoProfile& profile, const WindowSpec& spec,
    const std::vector<std::pair<Eigen::Index, int>>& instances) {
  spec.validate();
  if (profile.width() < spec.width)
    throw empty_input_error("make_gesture_windows: profile narrower than one window");
  std::vector<LabeledWindow> out;
  for (const auto& [last_col, class_id] : instances) {
    LabeledWindow w = window_at(profile, spec, last_col);
    w.kind = LabelKind::Gesture;
    w.gesture_label = class_id;
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'R', 'A', 'P', 'D'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xFF));
  buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(buf, bits);
}

void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  const std::uint8_t* take(std::size_t n) {
    if (pos_ + n > size_) throw truncation_error("dataset: file ends mid-record");
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  std::uint16_t u16() {
    const std::uint8_t* p = take(2);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    const std::uint8_t* p = take(4);
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    const std::uint8_t* p = take(8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  bool at_end() const { return pos_ == size_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  ds.spec.validate();
  std::string buf;
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);

  int rows = 54;
  if (!ds.windows.empty()) rows = static_cast<int>(ds.windows.front().rows());
  const json header = {
      {"count", ds.windows.size()},
      {"width", ds.spec.width},
      {"stride", ds.spec.stride},
      {"channels", ds.spec.channels},
      {"rows", rows},
      {"label", ds.kind == LabelKind::Pose ? "pose" : "gesture"},
  };
  const std::string header_str = header.dump();
  put_u32(buf, static_cast<std::uint32_t>(header_str.size()));
  buf += header_str;

  for (const auto& w : ds.windows) {
    if (w.kind != ds.kind)
      throw parameter_error("save_dataset: window label kind mismatch");
    std::string payload;
    put_f64(payload, w.t_last);
    for (Eigen::Index i = 0; i < w.differential.size(); ++i)
      put_f32(payload, w.differential.data()[i]);
    for (Eigen::Index i = 0; i < w.original.size(); ++i)
      put_f32(payload, w.original.data()[i]);
    if (ds.kind == LabelKind::Pose) {
      for (int i = 0; i < 60; ++i) put_f32(payload, w.pose_label[i]);
    } else {
      put_u32(payload, static_cast<std::uint32_t>(w.gesture_label));
    }
    put_u32(buf, static_cast<std::uint32_t>(payload.size()));
    const std::uint32_t crc = crc32_ieee(
        reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size());
    buf += payload;
    put_u32(buf, crc);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw io_error("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  Reader r(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());

  const std::uint8_t* magic = r.take(4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw bad_magic_error("dataset: not a RAPD file");
  const std::uint16_t version = r.u16();
  if (version != kVersion)
    throw version_error("dataset: unsupported version " + std::to_string(version));

  const std::uint32_t header_len = r.u32();
  const std::uint8_t* header_bytes = r.take(header_len);
  json header;
  try {
    header = json::parse(header_bytes, header_bytes + header_len);
  } catch (const json::exception& e) {
    throw truncation_error(std::string("dataset: bad header: ") + e.what());
  }

  Dataset ds;
  ds.spec.width = header.at("width").get<int>();
  ds.spec.stride = header.at("stride").get<int>();
  ds.spec.channels = header.at("channels").get<int>();
  const int rows = header.at("rows").get<int>();
  ds.kind = header.at("label").get<std::string>() == "pose" ? LabelKind::Pose
                                                            : LabelKind::Gesture;
  const auto count = header.at("count").get<std::uint64_t>();

  const std::size_t channel_size =
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(ds.spec.width);
  for (std::uint64_t rec = 0; rec < count; ++rec) {
    const std::uint32_t payload_len = r.u32();
    const std::uint8_t* payload = r.take(payload_len);
    const std::uint32_t stored_crc = r.u32();
    if (crc32_ieee(payload, payload_len) != stored_crc)
      throw integrity_error("dataset: record " + std::to_string(rec) +
                            " failed its checksum");
    Reader pr(payload, payload_len);
    LabeledWindow w;
    w.kind = ds.kind;
    w.t_last = pr.f64();
    w.differential.resize(rows, ds.spec.width);
    for (std::size_t i = 0; i < channel_size; ++i)
      w.differential.data()[i] = pr.f32();
    w.original.resize(rows, ds.spec.width);
    for (std::size_t i = 0; i < channel_size; ++i) w.original.data()[i] = pr.f32();
    if (ds.kind == LabelKind::Pose) {
      for (int i = 0; i < 60; ++i) w.pose_label[i] = pr.f32();
    } else {
      w.gesture_label = static_cast<int>(pr.u32());
    }
    if (!pr.at_end()) throw truncation_error("dataset: record has trailing bytes");
    ds.windows.push_back(std::move(w));
  }
  if (!r.at_end()) throw truncation_error("dataset: trailing bytes after records");
  return ds;
}

}  // namespace rap
