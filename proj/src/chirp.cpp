#include "rap/chirp.hpp"

#include <cmath>

#include "rap/errors.hpp"
#include "rap/fft.hpp"

namespace rap {

void ChirpParams::validate() const {
  if (!(sample_rate > 0)) throw parameter_error("chirp: sample_rate must be > 0");
  if (!(0 < f_start && f_start < f_end && f_end < sample_rate / 2))
    throw parameter_error("chirp: need 0 < f_start < f_end < sample_rate/2");
  if (frame_len < 2) throw parameter_error("chirp: frame_len must be >= 2");
  if (!(amplitude > 0 && amplitude <= 1.0))
    throw parameter_error("chirp: amplitude must be in (0, 1]");
  if (edge_taper < 0 || 2 * edge_taper > frame_len)
    throw parameter_error("chirp: edge_taper must fit inside the frame");
}

Waveform generate_chirp(const ChirpParams& p) {
  p.validate();
  const double T = p.frame_duration();
  const double slope = (p.f_end - p.f_start) / T;  // Hz per second
  Waveform w;
  w.sample_rate = p.sample_rate;
  w.samples.resize(p.frame_len);
  for (int n = 0; n < p.frame_len; ++n) {
    const double t = n / p.sample_rate;
    const double phase = 2.0 * M_PI * (p.f_start * t + 0.5 * slope * t * t);
    w.samples[n] = p.amplitude * std::sin(phase);
  }
  if (p.edge_taper > 0) {
    for (int n = 0; n < p.edge_taper; ++n) {
      const double g = 0.5 * (1.0 - std::cos(M_PI * n / p.edge_taper));
      w.samples[n] *= g;
      w.samples[p.frame_len - 1 - n] *= g;
    }
  }
  return w;
}

Waveform bandpass(const Waveform& w, double lo, double hi, double transition_hz) {
  if (w.sample_rate <= 0) throw parameter_error("bandpass: waveform has no sample rate");
  if (!(0 < lo && lo < hi && hi < w.sample_rate / 2))
    throw parameter_error("bandpass: need 0 < lo < hi < sample_rate/2");
  if (transition_hz < 0) throw parameter_error("bandpass: negative transition width");
  if (w.samples.size() == 0) return w;

  const Eigen::Index n = w.samples.size();
  Eigen::VectorXcd spectrum = fft_forward(w.samples);
  const double bin_hz = w.sample_rate / static_cast<double>(n);
  const double tw = transition_hz;
  for (Eigen::Index k = 0; k < n; ++k) {
    // |frequency| of bin k; bins above n/2 are negative frequencies.
    const double f = std::min<double>(k, n - k) * bin_hz;
    double gain = 0.0;
    if (f >= lo && f <= hi) {
      gain = 1.0;
    } else if (tw > 0 && f > lo - tw && f < lo) {
      gain = 0.5 * (1.0 + std::cos(M_PI * (lo - f) / tw));
    } else if (tw > 0 && f > hi && f < hi + tw) {
      gain = 0.5 * (1.0 + std::cos(M_PI * (f - hi) / tw));
    }
    spectrum[k] *= gain;
  }
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.start_time = w.start_time;
  out.samples = fft_inverse_real(spectrum);
  return out;
}

std::vector<Waveform> split_frames(const Waveform& w, int frame_len) {
  if (frame_len < 1) throw parameter_error("split_frames: frame_len must be >= 1");
  if (w.samples.size() < frame_len)
    throw empty_input_error("split_frames: waveform shorter than one frame");
  const Eigen::Index count = w.samples.size() / frame_len;
  std::vector<Waveform> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    Waveform f;
    f.sample_rate = w.sample_rate;
    f.start_time = w.start_time + static_cast<double>(i * frame_len) / w.sample_rate;
    f.samples = w.samples.segment(i * frame_len, frame_len);
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace rap
