#pragma once

#include <vector>

#include "rap/waveform.hpp"

namespace rap {

/// One transmitted excitation frame: a linear up-chirp swept across the
/// frame, restarted at phase 0 every frame (frame-periodic transmission).
struct ChirpParams {
  double f_start = 20000.0;     // Hz
  double f_end = 24000.0;       // Hz
  double sample_rate = 50000.0; // Hz
  int frame_len = 600;          // samples; 12 ms at defaults
  double amplitude = 1.0;       // (0, 1]
  int edge_taper = 0;           // raised-cosine taper samples per edge, 0 = off

  double frame_duration() const { return frame_len / sample_rate; }
  void validate() const;  // throws parameter_error
};

/// One frame of the excitation. Pure function of params: same params, same
/// samples, bit for bit. Instantaneous frequency sweeps f_start -> f_end
/// across the frame; phase 0 at sample 0.
Waveform generate_chirp(const ChirpParams& params);

/// Zero-phase frequency-domain band-pass. Unit gain on [lo, hi], raised-cosine
/// transitions of transition_hz on both sides, zero beyond. Output length
/// equals input length; no group-delay shift.
Waveform bandpass(const Waveform& w, double lo, double hi,
                  double transition_hz = 500.0);

/// Consecutive non-overlapping frames of exactly frame_len samples; the
/// trailing remainder is discarded. Sample values are copied bit-exactly.
std::vector<Waveform> split_frames(const Waveform& w, int frame_len);

}  // namespace rap
