#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "rap/waveform.hpp"

namespace rap {

// Wire framing for the sensor uplink: 0xA5 0x5A sync, u32 LE sequence
// number, 600 signed 16-bit LE samples (one 12 ms chirp period), and a
// CRC-16/CCITT-FALSE over seq+payload, LE. 1208 bytes total; the payload
// alone is the 800 kbps PCM stream.
inline constexpr int kPayloadSamples = 600;
inline constexpr std::size_t kPacketSize = 2 + 4 + 2 * kPayloadSamples + 2;
inline constexpr std::uint8_t kSync0 = 0xA5;
inline constexpr std::uint8_t kSync1 = 0x5A;

struct SensorPacket {
  std::uint32_t seq = 0;
  std::array<std::int16_t, kPayloadSamples> payload{};

  /// Payload as amplitudes in [-1, 1].
  Eigen::VectorXd samples() const;
};

/// Quantizes (+-1.0 <-> +-32767, round half away from zero) and frames.
std::array<std::uint8_t, kPacketSize> encode_packet(std::uint32_t seq,
                                                    std::span<const double> samples);
std::array<std::uint8_t, kPacketSize> encode_packet(const SensorPacket& packet);

/// Validates sync and CRC. Throws truncation_error / framing_error /
/// integrity_error.
SensorPacket decode_packet(std::span<const std::uint8_t> bytes);

/// Frame a waveform into consecutive packets (whole frames only).
std::vector<std::uint8_t> encode_capture(const Waveform& w, std::uint32_t first_seq = 0);
void write_capture(const std::filesystem::path& path, const Waveform& w,
                   std::uint32_t first_seq = 0);

struct GapEvent {
  std::uint32_t before_seq = 0;  // last seq seen before the hole
  std::uint32_t after_seq = 0;   // first seq seen after it
  std::int64_t missing = 0;
};

/// Pull-based reader over a capture file of concatenated packets. Packets are
/// paced at 83.33/s * rate_factor; rate_factor 0 streams as fast as possible.
/// Sequence discontinuities are reported as gap events; a torn final packet
/// sets truncated() and ends the stream cleanly.
class PacketReplay {
 public:
  PacketReplay(const std::filesystem::path& path, double rate_factor,
               double packets_per_second = 50000.0 / 600.0);

  std::optional<SensorPacket> next();

  const std::vector<GapEvent>& gaps() const { return gaps_; }
  bool truncated() const { return truncated_; }
  std::size_t emitted() const { return emitted_; }

 private:
  std::ifstream in_;
  double rate_factor_;
  double packet_interval_s_;
  std::size_t emitted_ = 0;
  bool truncated_ = false;
  bool started_ = false;
  bool have_prev_seq_ = false;
  std::uint32_t prev_seq_ = 0;
  std::chrono::steady_clock::time_point epoch_;
  std::vector<GapEvent> gaps_;
};

}  // namespace rap
