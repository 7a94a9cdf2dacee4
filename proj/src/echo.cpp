#include "rap/echo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "rap/chirp.hpp"
#include "rap/errors.hpp"
#include "rap/fft.hpp"
#include "rap/parallel.hpp"

namespace rap {

void EchoConfig::validate() const {
  if (speed_of_sound <= 0 || sample_rate <= 0)
    throw parameter_error("echo: speed_of_sound and sample_rate must be > 0");
  if (frame_len < 2) throw parameter_error("echo: frame_len must be >= 2");
  if (crop_len < 1 || crop_len > frame_len)
    throw parameter_error("echo: crop_len must be in [1, frame_len]");
  if (t0_estimation_frames < 1)
    throw parameter_error("echo: t0_estimation_frames must be >= 1");
}

Eigen::VectorXd cross_correlate(const Waveform& rx_frame, const Waveform& tmpl) {
  if (rx_frame.samples.size() != tmpl.samples.size())
    throw parameter_error("cross_correlate: length mismatch");
  if (rx_frame.sample_rate != tmpl.sample_rate)
    throw parameter_error("cross_correlate: sample_rate mismatch");
  if (rx_frame.samples.size() == 0)
    throw empty_input_error("cross_correlate: empty frames");
  const Eigen::VectorXcd rx_spec = fft_forward(rx_frame.samples);
  const Eigen::VectorXcd tmpl_spec = fft_forward(tmpl.samples);
  return fft_inverse_real(rx_spec.cwiseProduct(tmpl_spec.conjugate()));
}

Eigen::VectorXd correlation_envelope(const Eigen::VectorXd& corr) {
  if (corr.size() == 0) throw empty_input_error("correlation_envelope: empty");
  const Eigen::Index n = corr.size();
  Eigen::VectorXcd spectrum = fft_forward(corr);
  // Analytic signal: drop negative frequencies, double the positive ones.
  for (Eigen::Index k = 1; k < (n + 1) / 2; ++k) spectrum[k] *= 2.0;
  for (Eigen::Index k = n / 2 + 1; k < n; ++k) spectrum[k] = 0.0;
  return fft_inverse(spectrum).cwiseAbs();
}

int estimate_t0(const std::vector<Eigen::VectorXd>& corr_frames,
                const EchoConfig& cfg) {
  if (corr_frames.empty()) throw empty_input_error("estimate_t0: no frames");
  const std::size_t used =
      std::min<std::size_t>(corr_frames.size(),
                            static_cast<std::size_t>(cfg.t0_estimation_frames));
  std::vector<int> peaks(used);
  for (std::size_t i = 0; i < used; ++i) {
    Eigen::Index arg = 0;
    correlation_envelope(corr_frames[i]).maxCoeff(&arg);
    peaks[i] = static_cast<int>(arg);
  }
  std::sort(peaks.begin(), peaks.end());
  return peaks[(peaks.size() - 1) / 2];  // lower median
}

EchoFrame crop_frame(const Eigen::VectorXd& corr, int t0, const EchoConfig& cfg,
                     std::int64_t frame_index) {
  if (t0 < 0 || t0 >= corr.size())
    throw parameter_error("crop_frame: t0 outside the correlation");
  EchoFrame frame;
  frame.frame_index = frame_index;
  frame.t0_offset = t0;
  frame.values.resize(cfg.crop_len);
  const Eigen::Index n = corr.size();
  for (int p = 0; p < cfg.crop_len; ++p)
    frame.values[p] = corr[(t0 + p) % n];
  return frame;
}

double pixel_to_distance(double pixel, const EchoConfig& cfg) {
  if (pixel < 0) throw parameter_error("pixel_to_distance: negative pixel");
  return pixel * cfg.pixel_pitch_mm();
}

int distance_to_pixel(double distance_mm, const EchoConfig& cfg) {
  if (distance_mm < 0) throw parameter_error("distance_to_pixel: negative distance");
  return static_cast<int>(std::llround(distance_mm / cfg.pixel_pitch_mm()));
}

EchoProfile build_profile(const std::vector<EchoFrame>& frames,
                          const EchoConfig& cfg) {
  if (frames.empty()) throw empty_input_error("build_profile: no frames");
  const Eigen::Index rows = frames.front().values.size();
  const Eigen::Index w = static_cast<Eigen::Index>(frames.size());
  EchoProfile profile;
  profile.frame_period = cfg.frame_period();
  profile.start_frame_index = frames.front().frame_index;
  profile.original.resize(rows, w);
  profile.differential.resize(rows, w);
  for (Eigen::Index j = 0; j < w; ++j) {
    const EchoFrame& f = frames[static_cast<std::size_t>(j)];
    if (f.values.size() != rows)
      throw parameter_error("build_profile: inconsistent crop length");
    if (f.frame_index != profile.start_frame_index + j)
      throw sequencing_error("build_profile: frame indices not consecutive");
    profile.original.col(j) = f.values;
  }
  profile.differential.col(0).setZero();
  for (Eigen::Index j = 1; j < w; ++j)
    profile.differential.col(j) = profile.original.col(j) - profile.original.col(j - 1);
  return profile;
}

EchoProfile compute_profile(const Waveform& rx, const Waveform& tmpl,
                            const EchoConfig& cfg, const ProfileOptions& opt,
                            int* t0_out) {
  cfg.validate();
  const std::vector<Waveform> frames = split_frames(rx, cfg.frame_len);
  std::vector<Eigen::VectorXd> corr(frames.size());
  parallel_for(static_cast<std::int64_t>(frames.size()),
               [&](std::int64_t lo, std::int64_t hi) {
                 for (std::int64_t i = lo; i < hi; ++i) {
                   const auto& f = frames[static_cast<std::size_t>(i)];
                   if (opt.band_lo > 0 && opt.band_hi > opt.band_lo) {
                     corr[static_cast<std::size_t>(i)] = cross_correlate(
                         bandpass(f, opt.band_lo, opt.band_hi), tmpl);
                   } else {
                     corr[static_cast<std::size_t>(i)] = cross_correlate(f, tmpl);
                   }
                 }
               });
  const int t0 = opt.t0_override >= 0 ? opt.t0_override : estimate_t0(corr, cfg);
  if (t0_out) *t0_out = t0;
  std::vector<EchoFrame> cropped;
  cropped.reserve(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i)
    cropped.push_back(crop_frame(corr[i], t0, cfg, static_cast<std::int64_t>(i)));
  return build_profile(cropped, cfg);
}

namespace {

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << buf << (c + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw parse_error("not a number: '" + cell + "'", line_no);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error("ragged row", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

void write_matrix_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << "P2\n" << m.cols() << " " << m.rows() << "\n255\n";
  const double lo = m.size() ? m.minCoeff() : 0.0;
  const double hi = m.size() ? m.maxCoeff() : 0.0;
  const double span = hi - lo;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const int v = span > 0
                        ? static_cast<int>(std::lround(255.0 * (m(r, c) - lo) / span))
                        : 0;
      out << v << (c + 1 < m.cols() ? " " : "");
    }
    out << "\n";
  }
}

}  // namespace

void write_profile_csv(const EchoProfile& p, const std::filesystem::path& original_csv,
                       const std::filesystem::path& differential_csv) {
  write_matrix_csv(original_csv, p.original);
  write_matrix_csv(differential_csv, p.differential);
}

EchoProfile read_profile_csv(const std::filesystem::path& original_csv,
                             const std::filesystem::path& differential_csv,
                             double frame_period, std::int64_t start_frame_index) {
  EchoProfile p;
  p.original = read_matrix_csv(original_csv);
  p.differential = read_matrix_csv(differential_csv);
  if (p.original.rows() != p.differential.rows() ||
      p.original.cols() != p.differential.cols())
    throw parameter_error("read_profile_csv: channel shapes differ");
  p.frame_period = frame_period;
  p.start_frame_index = start_frame_index;
  return p;
}

void write_profile_pgm(const EchoProfile& p, const std::filesystem::path& original_pgm,
                       const std::filesystem::path& differential_pgm) {
  write_matrix_pgm(original_pgm, p.original);
  write_matrix_pgm(differential_pgm, p.differential);
}

}  // namespace rap
