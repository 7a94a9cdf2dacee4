#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rap/augment.hpp"
#include "rap/rng.hpp"
#include "test_util.hpp"

using namespace rap;

namespace {

EchoProfile random_profile(int width, std::uint64_t seed) {
  Rng rng(seed);
  EchoProfile p;
  p.original.resize(54, width);
  p.differential.resize(54, width);
  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index r = 0; r < 54; ++r) {
      p.original(r, c) = rng.uniform(-2, 2);
      p.differential(r, c) = rng.uniform(-1, 1);
    }
  return p;
}

EchoProfile one_hot_profile(int pixel, int width = 4) {
  EchoProfile p;
  p.original = Eigen::MatrixXd::Zero(54, width);
  p.differential = Eigen::MatrixXd::Zero(54, width);
  p.original.row(pixel).setOnes();
  p.differential.row(pixel).setConstant(0.5);
  return p;
}

}  // namespace

TEST_CASE("pixel_noise with probability zero is the identity") {
  const EchoProfile p = random_profile(20, 1);
  AugmentConfig cfg;
  cfg.pixel_noise_prob = 0.0;
  const EchoProfile q = pixel_noise(p, cfg);
  CHECK(q.original == p.original);
  CHECK(q.differential == p.differential);
}

TEST_CASE("pixel_noise stays within +-5% and preserves signs") {
  const EchoProfile p = random_profile(50, 2);
  AugmentConfig cfg;
  cfg.seed = 7;
  const EchoProfile q = pixel_noise(p, cfg);
  for (Eigen::Index c = 0; c < p.width(); ++c)
    for (Eigen::Index r = 0; r < 54; ++r) {
      const double in = p.original(r, c);
      const double out = q.original(r, c);
      if (in != 0.0) {
        const double ratio = out / in;
        CHECK(ratio >= 0.95 - 1e-12);
        CHECK(ratio <= 1.05 + 1e-12);
        CHECK(std::signbit(out) == std::signbit(in));
      }
    }
}

TEST_CASE("pixel_noise modifies about 80% of pixels") {
  // 54 x 9260 x 2 channels is just over one million pixels.
  const EchoProfile p = random_profile(9260, 3);
  AugmentConfig cfg;
  cfg.seed = 11;
  const EchoProfile q = pixel_noise(p, cfg);
  std::int64_t modified = 0, total = 0;
  auto count = [&](const Eigen::MatrixXd& in, const Eigen::MatrixXd& out) {
    for (Eigen::Index c = 0; c < in.cols(); ++c)
      for (Eigen::Index r = 0; r < in.rows(); ++r) {
        ++total;
        if (in(r, c) != out(r, c)) ++modified;
      }
  };
  count(p.original, q.original);
  count(p.differential, q.differential);
  CHECK(total >= 1000000);
  const double fraction = static_cast<double>(modified) / static_cast<double>(total);
  CHECK(fraction >= 0.79);
  CHECK(fraction <= 0.81);
}

TEST_CASE("vertical_shift moves rows and zero-fills") {
  AugmentConfig cfg;
  // Find seeds that draw +2 and 0 so the example assertions are exact.
  int seed_plus2 = -1, seed_zero = -1;
  for (int s = 0; s < 200 && (seed_plus2 < 0 || seed_zero < 0); ++s) {
    Rng rng(splitmix64(static_cast<std::uint64_t>(s)));
    const int draw = static_cast<int>(rng.uniform_int(-3, 3));
    if (draw == 2 && seed_plus2 < 0) seed_plus2 = s;
    if (draw == 0 && seed_zero < 0) seed_zero = s;
  }
  REQUIRE(seed_plus2 >= 0);
  REQUIRE(seed_zero >= 0);

  const EchoProfile p = one_hot_profile(25);
  cfg.seed = static_cast<std::uint64_t>(seed_plus2);
  const EchoProfile shifted = vertical_shift(p, cfg);
  CHECK(shifted.original.row(27) == p.original.row(25));
  CHECK(shifted.original.row(25).isZero(0.0));
  CHECK(shifted.original.row(0).isZero(0.0));
  CHECK(shifted.differential.row(27) == p.differential.row(25));

  cfg.seed = static_cast<std::uint64_t>(seed_zero);
  const EchoProfile same = vertical_shift(p, cfg);
  CHECK(same.original == p.original);
}

TEST_CASE("vertical_shift draws stay within +-3 pixels") {
  const EchoProfile p = one_hot_profile(25);
  AugmentConfig cfg;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    cfg.seed = seed;
    const EchoProfile q = vertical_shift(p, cfg);
    int found = -1;
    for (int r = 0; r < 54; ++r)
      if (q.original(r, 0) != 0.0) found = r;
    REQUIRE(found >= 0);
    CHECK(std::abs(found - 25) <= 3);
  }
}

TEST_CASE("three pixels of shift spans 10.29 mm of range") {
  EchoConfig echo;
  CHECK(3 * echo.pixel_pitch_mm() == doctest::Approx(10.29));
}

TEST_CASE("horizontal_shift bounds and zero-fill") {
  const EchoProfile p = random_profile(100, 5);
  AugmentConfig cfg;
  int max_seen = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    cfg.seed = seed;
    const EchoProfile q = horizontal_shift(p, cfg);
    // Recover the shift by matching a column.
    int shift = 999;
    for (int s = -13; s <= 13; ++s) {
      const Eigen::Index src = 50 - s;
      if (q.original.col(50) == p.original.col(src)) {
        shift = s;
        break;
      }
    }
    REQUIRE(shift != 999);  // max |s| = round(0.13 * 100) = 13 columns
    max_seen = std::max(max_seen, std::abs(shift));
    if (shift > 0) CHECK(q.original.col(0).isZero(0.0));
    if (shift < 0) CHECK(q.original.col(99).isZero(0.0));
  }
  CHECK(max_seen == 13);  // 13 columns * 12 ms = 0.156 s
}

TEST_CASE("horizontal shift of 13 columns is about 0.15 seconds") {
  EchoConfig echo;
  CHECK(13 * echo.frame_period() == doctest::Approx(0.156));
}

TEST_CASE("shifting forward then back restores interior columns") {
  const EchoProfile p = random_profile(40, 6);
  auto shift_by = [&](const EchoProfile& in, int s) {
    EchoProfile out = in;
    out.original = Eigen::MatrixXd::Zero(54, in.width());
    out.differential = Eigen::MatrixXd::Zero(54, in.width());
    for (Eigen::Index c = 0; c < in.width(); ++c) {
      const Eigen::Index src = c - s;
      if (src >= 0 && src < in.width()) {
        out.original.col(c) = in.original.col(src);
        out.differential.col(c) = in.differential.col(src);
      }
    }
    return out;
  };
  const EchoProfile there = shift_by(p, 5);
  const EchoProfile back = shift_by(there, -5);
  // Columns that never left the frame are restored; the 5 columns shifted
  // out past the right edge are gone and come back as zeros.
  CHECK(back.original.leftCols(35) == p.original.leftCols(35));
  CHECK(back.original.rightCols(5).isZero(0.0));
}

TEST_CASE("augmentations are bit-identical per seed") {
  const EchoProfile p = random_profile(64, 9);
  AugmentConfig cfg;
  cfg.seed = 1234;
  CHECK(pixel_noise(p, cfg).original == pixel_noise(p, cfg).original);
  CHECK(vertical_shift(p, cfg).original == vertical_shift(p, cfg).original);
  CHECK(horizontal_shift(p, cfg).original == horizontal_shift(p, cfg).original);
  AugmentConfig other = cfg;
  other.seed = 1235;
  CHECK(pixel_noise(p, cfg).original != pixel_noise(p, other).original);
}

TEST_CASE("shifts preserve the interior multiset of values") {
  const EchoProfile p = random_profile(30, 10);
  AugmentConfig cfg;
  cfg.seed = 77;
  const EchoProfile v = vertical_shift(p, cfg);
  const EchoProfile h = horizontal_shift(p, cfg);
  auto sorted_values = [](const Eigen::MatrixXd& m) {
    std::vector<double> v(m.data(), m.data() + m.size());
    std::sort(v.begin(), v.end());
    return v;
  };
  // Every non-zero output value comes from the input (shifts only move).
  auto in_vals = sorted_values(p.original);
  for (const double x : sorted_values(v.original))
    if (x != 0.0) CHECK(std::binary_search(in_vals.begin(), in_vals.end(), x));
  for (const double x : sorted_values(h.original))
    if (x != 0.0) CHECK(std::binary_search(in_vals.begin(), in_vals.end(), x));
}

TEST_CASE("augment config validation") {
  const EchoProfile p = random_profile(10, 11);
  AugmentConfig cfg;
  cfg.pixel_noise_prob = 1.5;
  CHECK_THROWS_AS(pixel_noise(p, cfg), parameter_error);
  cfg = AugmentConfig{};
  cfg.vshift_max = -1;
  CHECK_THROWS_AS(vertical_shift(p, cfg), parameter_error);
}
