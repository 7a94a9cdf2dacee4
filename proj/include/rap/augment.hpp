#pragma once

#include <cstdint>

#include "rap/echo.hpp"

namespace rap {

/// In-place echo-profile augmentation parameters. All three transforms are
/// pure functions of (input, seed): repeat calls are bit-identical.
struct AugmentConfig {
  double pixel_noise_range = 0.05;  // multiplicative, [-range, +range]
  double pixel_noise_prob = 0.8;
  int vshift_max = 3;               // pixels
  double hshift_frac = 0.13;        // fraction of the window width
  double hshift_prob = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Each pixel independently, with pixel_noise_prob, is scaled by (1 + u),
/// u ~ U[-range, +range]. Signs are preserved. Channel order: original
/// first, then differential, column-major within each.
EchoProfile pixel_noise(const EchoProfile& p, const AugmentConfig& cfg);

/// One integer shift s ~ U{-vshift_max..vshift_max} per profile, applied to
/// both channels and every column; vacated rows are zero-filled.
EchoProfile vertical_shift(const EchoProfile& p, const AugmentConfig& cfg);

/// With hshift_prob, one integer column shift s ~ U{-M..M},
/// M = round(hshift_frac * width); zero-filled. Meant for classification
/// windows; pose-regression windows keep their time alignment.
EchoProfile horizontal_shift(const EchoProfile& p, const AugmentConfig& cfg);

}  // namespace rap
