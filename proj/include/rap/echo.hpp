#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rap/waveform.hpp"

namespace rap {

/// Range-processing constants. One correlation sample ("pixel") spans
/// speed_of_sound / (2 * sample_rate) of round-trip range: 3.43 mm at
/// defaults; the 54-pixel crop covers 185.22 mm beyond the direct path.
struct EchoConfig {
  double speed_of_sound = 343000.0;  // mm/s
  double sample_rate = 50000.0;      // Hz
  int frame_len = 600;               // samples per chirp period
  int crop_len = 54;                 // pixels kept past the direct path
  int t0_estimation_frames = 20;     // frames used to lock the direct path

  double pixel_pitch_mm() const { return speed_of_sound / (2.0 * sample_rate); }
  double frame_period() const { return frame_len / sample_rate; }
  void validate() const;
};

/// One 12 ms chirp period reduced to crop_len signed correlation values.
struct EchoFrame {
  Eigen::VectorXd values;       // length crop_len
  std::int64_t frame_index = 0;
  int t0_offset = 0;            // direct-path pixel in the uncropped correlation
};

/// Echo frames stacked along time, plus their first difference. Column j of
/// differential = original j - original j-1; column 0 is all zeros.
struct EchoProfile {
  Eigen::MatrixXd original;      // crop_len x W
  Eigen::MatrixXd differential;  // same shape
  double frame_period = 0.012;   // seconds per column
  std::int64_t start_frame_index = 0;

  Eigen::Index width() const { return original.cols(); }
  Eigen::Index rows() const { return original.rows(); }
  double column_time(Eigen::Index j) const {
    return static_cast<double>(start_frame_index + j) * frame_period;
  }
};

/// Circular cross-correlation: entry k = sum_n rx[(n+k) mod L] * template[n].
/// Computed in the frequency domain; signed values are retained.
Eigen::VectorXd cross_correlate(const Waveform& rx_frame, const Waveform& tmpl);

/// Correlation magnitude as seen by peak detectors: the analytic-signal
/// envelope. The raw band-pass correlation oscillates at the chirp's center
/// frequency under a slow envelope, so argmax |corr| can miss a fractional
/// delay by a few samples; the envelope peaks at the true delay.
Eigen::VectorXd correlation_envelope(const Eigen::VectorXd& corr);

/// Direct-path pixel: median over the first t0_estimation_frames of the
/// argmax of the correlation magnitude. Estimated once, then held for the
/// session.
int estimate_t0(const std::vector<Eigen::VectorXd>& corr_frames,
                const EchoConfig& cfg);

/// Keep crop_len pixels starting at t0, wrapping circularly past the end.
/// Pixel p maps to p * pixel_pitch_mm of path length beyond the direct path.
EchoFrame crop_frame(const Eigen::VectorXd& corr, int t0, const EchoConfig& cfg,
                     std::int64_t frame_index = 0);

double pixel_to_distance(double pixel, const EchoConfig& cfg);  // mm
int distance_to_pixel(double distance_mm, const EchoConfig& cfg);

/// Stack consecutive frames into an EchoProfile. Frame indices must be
/// consecutive; the differential channel is derived per the type contract.
EchoProfile build_profile(const std::vector<EchoFrame>& frames,
                          const EchoConfig& cfg);

struct ProfileOptions {
  double band_lo = 0.0;  // band-pass conditioning per frame; 0/0 disables
  double band_hi = 0.0;
  int t0_override = -1;  // >= 0: skip estimation and pin the direct path
};

/// Batch path: split rx into frames, condition, correlate against the
/// template, estimate t0 (or take the override), crop, stack. The streaming
/// pipeline performs these exact steps frame by frame, so batch and online
/// outputs are bit-identical on the same samples.
EchoProfile compute_profile(const Waveform& rx, const Waveform& tmpl,
                            const EchoConfig& cfg, const ProfileOptions& opt = {},
                            int* t0_out = nullptr);

// Inspection exports. CSV: row = pixel, column = frame. PGM: plain (P2)
// 8-bit, per-channel min-max scaled.
void write_profile_csv(const EchoProfile& p, const std::filesystem::path& original_csv,
                       const std::filesystem::path& differential_csv);
EchoProfile read_profile_csv(const std::filesystem::path& original_csv,
                             const std::filesystem::path& differential_csv,
                             double frame_period = 0.012,
                             std::int64_t start_frame_index = 0);
void write_profile_pgm(const EchoProfile& p, const std::filesystem::path& original_pgm,
                       const std::filesystem::path& differential_pgm);

}  // namespace rap
