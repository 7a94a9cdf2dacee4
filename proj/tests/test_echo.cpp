#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rap/chirp.hpp"
#include "rap/echo.hpp"
#include "rap/errors.hpp"
#include "rap/rng.hpp"
#include "test_util.hpp"

using namespace rap;

namespace {

Waveform random_frame(Rng& rng, int len = 600) {
  Waveform w;
  w.sample_rate = 50000.0;
  w.samples.resize(len);
  for (int i = 0; i < len; ++i) w.samples[i] = rng.uniform(-1, 1);
  return w;
}

Waveform circular_delay_int(const Waveform& w, int shift) {
  Waveform out = w;
  const Eigen::Index n = w.samples.size();
  for (Eigen::Index i = 0; i < n; ++i)
    out.samples[(i + shift) % n] = w.samples[i];
  return out;
}

}  // namespace

TEST_CASE("autocorrelation peaks at lag zero with the signal energy") {
  const Waveform chirp = generate_chirp(ChirpParams{});
  const Eigen::VectorXd corr = cross_correlate(chirp, chirp);
  Eigen::Index peak = 0;
  const double max_val = corr.maxCoeff(&peak);
  CHECK(peak == 0);
  CHECK(max_val == doctest::Approx(chirp.samples.squaredNorm()).epsilon(1e-12));
  CHECK(corr.cwiseAbs().maxCoeff() == doctest::Approx(max_val));
}

TEST_CASE("a circular delay moves the correlation argmax to the delay") {
  const Waveform chirp = generate_chirp(ChirpParams{});
  const Waveform delayed = circular_delay_int(chirp, 25);
  const Eigen::VectorXd corr = cross_correlate(delayed, chirp);
  Eigen::Index peak = 0;
  corr.maxCoeff(&peak);
  CHECK(peak == 25);
}

TEST_CASE("correlating zeros gives zeros") {
  const Waveform chirp = generate_chirp(ChirpParams{});
  Waveform zeros = chirp;
  zeros.samples.setZero();
  CHECK(cross_correlate(zeros, chirp).isZero(0.0));
}

TEST_CASE("cross_correlate rejects mismatched frames") {
  const Waveform chirp = generate_chirp(ChirpParams{});
  Waveform other = chirp;
  other.samples = Eigen::VectorXd::Zero(300);
  CHECK_THROWS_AS(cross_correlate(other, chirp), parameter_error);
}

TEST_CASE("frequency-domain correlation matches the direct O(L^2) oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const Waveform rx = random_frame(rng);
    const Waveform tmpl = random_frame(rng);
    const Eigen::VectorXd fast = cross_correlate(rx, tmpl);
    const Eigen::VectorXd direct =
        raptest::direct_circular_correlation(rx.samples, tmpl.samples);
    CHECK((fast - direct).norm() <= 1e-6 * direct.norm());
  }
}

TEST_CASE("estimate_t0 takes the median of early argmax peaks") {
  EchoConfig cfg;
  auto one_hot = [](int where) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(600);
    v[where] = 1.0;
    return v;
  };
  SUBCASE("median definition") {
    CHECK(estimate_t0({one_hot(10), one_hot(10), one_hot(11)}, cfg) == 10);
  }
  SUBCASE("constant frames") {
    CHECK(estimate_t0({one_hot(7), one_hot(7)}, cfg) == 7);
  }
  SUBCASE("negative peaks count via magnitude") {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(600);
    v[42] = -3.0;
    v[10] = 2.0;
    CHECK(estimate_t0({v}, cfg) == 42);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(estimate_t0({}, cfg), empty_input_error);
  }
  SUBCASE("only the first t0_estimation_frames are used") {
    std::vector<Eigen::VectorXd> frames(25, one_hot(5));
    for (int i = 20; i < 25; ++i) frames[static_cast<std::size_t>(i)] = one_hot(500);
    CHECK(estimate_t0(frames, cfg) == 5);
  }
}

TEST_CASE("crop_frame keeps 54 pixels starting at t0") {
  EchoConfig cfg;
  Eigen::VectorXd corr = Eigen::VectorXd::Zero(600);
  corr[2 + 25] = 4.5;
  const EchoFrame frame = crop_frame(corr, 2, cfg, 7);
  CHECK(frame.values.size() == 54);
  CHECK(frame.values[25] == 4.5);
  CHECK(frame.frame_index == 7);
  CHECK(frame.t0_offset == 2);
}

TEST_CASE("crop_frame wraps circularly near the end") {
  EchoConfig cfg;
  Eigen::VectorXd corr = Eigen::VectorXd::Zero(600);
  corr[1] = 9.0;  // wraps to crop pixel 31 when t0 = 570
  const EchoFrame frame = crop_frame(corr, 570, cfg);
  CHECK(frame.values[31] == 9.0);
}

TEST_CASE("pixel/distance conversions use 3.43 mm per pixel") {
  EchoConfig cfg;
  CHECK(cfg.pixel_pitch_mm() == doctest::Approx(3.43));
  CHECK(pixel_to_distance(1, cfg) == doctest::Approx(3.43));
  CHECK(pixel_to_distance(0, cfg) == 0.0);
  CHECK(distance_to_pixel(85.75, cfg) == 25);
  // Crop span and full-frame span.
  CHECK(pixel_to_distance(54, cfg) == doctest::Approx(185.22));
  CHECK(pixel_to_distance(600, cfg) == doctest::Approx(2058.0));
  CHECK_THROWS_AS(pixel_to_distance(-1, cfg), parameter_error);
  CHECK_THROWS_AS(distance_to_pixel(-5, cfg), parameter_error);
}

TEST_CASE("pixel -> distance -> pixel composes to identity") {
  EchoConfig cfg;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const int p = static_cast<int>(rng.uniform_int(0, 599));
    CHECK(distance_to_pixel(pixel_to_distance(p, cfg), cfg) == p);
  }
}

TEST_CASE("build_profile stacks frames and differences them") {
  EchoConfig cfg;
  auto frame = [&](std::int64_t idx, double fill) {
    EchoFrame f;
    f.frame_index = idx;
    f.values = Eigen::VectorXd::Constant(cfg.crop_len, fill);
    return f;
  };

  SUBCASE("single frame: differential column is zero") {
    const EchoProfile p = build_profile({frame(0, 3.0)}, cfg);
    CHECK(p.width() == 1);
    CHECK(p.differential.col(0).isZero(0.0));
    CHECK(p.original.col(0).isApproxToConstant(3.0));
  }
  SUBCASE("two identical frames: static scene") {
    const EchoProfile p = build_profile({frame(0, 2.0), frame(1, 2.0)}, cfg);
    CHECK(p.differential.col(1).isZero(0.0));
  }
  SUBCASE("differential is the elementwise difference") {
    EchoFrame f = frame(0, 1.0);
    EchoFrame g = frame(1, 0.0);
    Rng rng(9);
    for (int i = 0; i < cfg.crop_len; ++i) {
      f.values[i] = rng.uniform(-1, 1);
      g.values[i] = rng.uniform(-1, 1);
    }
    const EchoProfile p = build_profile({f, g}, cfg);
    CHECK(p.differential.col(1) == g.values - f.values);
  }
  SUBCASE("non-consecutive indices are a sequencing error") {
    CHECK_THROWS_AS(build_profile({frame(0, 1.0), frame(2, 1.0)}, cfg),
                    sequencing_error);
  }
}

TEST_CASE("summing differential columns telescopes back to the original") {
  // Integer-valued frames make the telescoping sum exact in floating point.
  EchoConfig cfg;
  Rng rng(21);
  std::vector<EchoFrame> frames;
  for (int i = 0; i < 12; ++i) {
    EchoFrame f;
    f.frame_index = i;
    f.values.resize(cfg.crop_len);
    for (int p = 0; p < cfg.crop_len; ++p)
      f.values[p] = static_cast<double>(rng.uniform_int(-100, 100));
    frames.push_back(std::move(f));
  }
  const EchoProfile profile = build_profile(frames, cfg);
  for (Eigen::Index j = 0; j < profile.width(); ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(cfg.crop_len);
    for (Eigen::Index k = 1; k <= j; ++k) acc += profile.differential.col(k);
    CHECK(acc == (profile.original.col(j) - profile.original.col(0)).eval());
  }
}

TEST_CASE("static frames give an identically zero differential") {
  EchoConfig cfg;
  Rng rng(33);
  Eigen::VectorXd values(cfg.crop_len);
  for (int i = 0; i < cfg.crop_len; ++i) values[i] = rng.uniform(-1, 1);
  std::vector<EchoFrame> frames;
  for (int i = 0; i < 8; ++i) frames.push_back({values, i, 0});
  const EchoProfile p = build_profile(frames, cfg);
  CHECK(p.differential.isZero(0.0));
}

TEST_CASE("profile csv round trip and pgm shape") {
  EchoConfig cfg;
  Rng rng(55);
  std::vector<EchoFrame> frames;
  for (int i = 0; i < 5; ++i) {
    EchoFrame f;
    f.frame_index = i;
    f.values.resize(cfg.crop_len);
    for (int p = 0; p < cfg.crop_len; ++p) f.values[p] = rng.uniform(-2, 2);
    frames.push_back(std::move(f));
  }
  const EchoProfile profile = build_profile(frames, cfg);
  const auto dir = raptest::temp_dir("profilecsv");
  write_profile_csv(profile, dir / "orig.csv", dir / "diff.csv");
  const EchoProfile back = read_profile_csv(dir / "orig.csv", dir / "diff.csv");
  CHECK(back.original == profile.original);
  CHECK(back.differential == profile.differential);

  write_profile_pgm(profile, dir / "orig.pgm", dir / "diff.pgm");
  std::ifstream pgm(dir / "orig.pgm");
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  pgm >> magic >> w >> h >> maxval;
  CHECK(magic == "P2");
  CHECK(w == 5);
  CHECK(h == 54);
  CHECK(maxval == 255);
  int v = -1, count = 0, lo = 256, hi = -1;
  while (pgm >> v) {
    ++count;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(count == 54 * 5);
  CHECK(lo == 0);    // min-max scaling touches both ends
  CHECK(hi == 255);
  std::filesystem::remove_all(dir);
}
