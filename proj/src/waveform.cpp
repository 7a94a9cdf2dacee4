#include "rap/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rap/errors.hpp"

namespace rap {

std::int16_t quantize_sample(double v) {
  double scaled = v * 32767.0;
  scaled = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
  if (scaled > 32767.0) scaled = 32767.0;
  if (scaled < -32767.0) scaled = -32767.0;
  return static_cast<std::int16_t>(scaled);
}

double dequantize_sample(std::int16_t v) {
  return static_cast<double>(v) / 32767.0;
}

void write_pcm16(const std::filesystem::path& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    const std::uint16_t u = static_cast<std::uint16_t>(quantize_sample(w.samples[i]));
    const char bytes[2] = {static_cast<char>(u & 0xFF),
                           static_cast<char>((u >> 8) & 0xFF)};
    out.write(bytes, 2);
  }
  if (!out) throw io_error("write failed: " + path.string());
}

Waveform read_pcm16(const std::filesystem::path& path, double sample_rate,
                    double start_time) {
  if (sample_rate <= 0) throw parameter_error("read_pcm16: sample_rate must be > 0");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const std::size_t n = bytes.size() / 2;  // trailing odd byte ignored
  Waveform w;
  w.sample_rate = sample_rate;
  w.start_time = start_time;
  w.samples.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t u =
        static_cast<std::uint8_t>(bytes[2 * i]) |
        (static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes[2 * i + 1])) << 8);
    w.samples[static_cast<Eigen::Index>(i)] =
        dequantize_sample(static_cast<std::int16_t>(u));
  }
  return w;
}

void write_waveform_csv(const std::filesystem::path& path, const Waveform& w) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  char buf[64];
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", w.samples[i]);
    out << buf;
  }
}

Waveform read_waveform_csv(const std::filesystem::path& path, double sample_rate,
                           double start_time) {
  if (sample_rate <= 0)
    throw parameter_error("read_waveform_csv: sample_rate must be > 0");
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw parse_error("not a number: '" + line + "'", line_no);
    }
  }
  Waveform w;
  w.sample_rate = sample_rate;
  w.start_time = start_time;
  w.samples = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                static_cast<Eigen::Index>(values.size()));
  return w;
}

}  // namespace rap
