#include "rap/augment.hpp"

#include <cmath>

#include "rap/errors.hpp"
#include "rap/rng.hpp"

namespace rap {

void AugmentConfig::validate() const {
  if (pixel_noise_prob < 0 || pixel_noise_prob > 1 || hshift_prob < 0 || hshift_prob > 1)
    throw parameter_error("augment: probabilities must be in [0, 1]");
  if (pixel_noise_range < 0 || vshift_max < 0 || hshift_frac < 0)
    throw parameter_error("augment: ranges must be >= 0");
}

EchoProfile pixel_noise(const EchoProfile& p, const AugmentConfig& cfg) {
  cfg.validate();
  EchoProfile out = p;
  Rng rng(splitmix64(cfg.seed));
  auto perturb = [&](Eigen::MatrixXd& channel) {
    for (Eigen::Index c = 0; c < channel.cols(); ++c)
      for (Eigen::Index r = 0; r < channel.rows(); ++r)
        if (rng.uniform01() < cfg.pixel_noise_prob)
          channel(r, c) *= 1.0 + rng.uniform(-cfg.pixel_noise_range,
                                             cfg.pixel_noise_range);
  };
  perturb(out.original);
  perturb(out.differential);
  return out;
}

namespace {

Eigen::MatrixXd shifted_rows(const Eigen::MatrixXd& m, int s) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::Index src = r - s;
    if (src >= 0 && src < m.rows()) out.row(r) = m.row(src);
  }
  return out;
}

Eigen::MatrixXd shifted_cols(const Eigen::MatrixXd& m, int s) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const Eigen::Index src = c - s;
    if (src >= 0 && src < m.cols()) out.col(c) = m.col(src);
  }
  return out;
}

}  // namespace

EchoProfile vertical_shift(const EchoProfile& p, const AugmentConfig& cfg) {
  cfg.validate();
  Rng rng(splitmix64(cfg.seed));
  const int s = static_cast<int>(rng.uniform_int(-cfg.vshift_max, cfg.vshift_max));
  EchoProfile out = p;
  if (s != 0) {
    out.original = shifted_rows(p.original, s);
    out.differential = shifted_rows(p.differential, s);
  }
  return out;
}

EchoProfile horizontal_shift(const EchoProfile& p, const AugmentConfig& cfg) {
  cfg.validate();
  Rng rng(splitmix64(cfg.seed));
  EchoProfile out = p;
  if (rng.uniform01() >= cfg.hshift_prob) return out;
  const int max_shift =
      static_cast<int>(std::llround(cfg.hshift_frac * static_cast<double>(p.width())));
  const int s = static_cast<int>(rng.uniform_int(-max_shift, max_shift));
  if (s != 0) {
    out.original = shifted_cols(p.original, s);
    out.differential = shifted_cols(p.differential, s);
  }
  return out;
}

}  // namespace rap
