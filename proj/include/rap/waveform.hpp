#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

namespace rap {

/// Real-valued PCM samples on a monotonic timeline. The continuous-amplitude
/// superset of the 16-bit wire representation.
struct Waveform {
  Eigen::VectorXd samples;
  double sample_rate = 0.0;   // Hz
  double start_time = 0.0;    // seconds

  Eigen::Index size() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// +-1.0 <-> +-32767, round half away from zero, clamped.
std::int16_t quantize_sample(double v);
double dequantize_sample(std::int16_t v);

// Raw 16-bit little-endian signed PCM, mono, no header. The raw stream does
// not carry a rate, so reads take one.
void write_pcm16(const std::filesystem::path& path, const Waveform& w);
Waveform read_pcm16(const std::filesystem::path& path, double sample_rate,
                    double start_time = 0.0);

// One sample per line, full double precision. Debug format.
void write_waveform_csv(const std::filesystem::path& path, const Waveform& w);
Waveform read_waveform_csv(const std::filesystem::path& path, double sample_rate,
                           double start_time = 0.0);

}  // namespace rap
