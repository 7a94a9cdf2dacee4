#include "rap/packet.hpp"

#include <chrono>
#include <cstring>
#include <thread>

#include "rap/crc.hpp"
#include "rap/errors.hpp"

namespace rap {

Eigen::VectorXd SensorPacket::samples() const {
  Eigen::VectorXd v(kPayloadSamples);
  for (int i = 0; i < kPayloadSamples; ++i) v[i] = dequantize_sample(payload[i]);
  return v;
}

std::array<std::uint8_t, kPacketSize> encode_packet(const SensorPacket& packet) {
  std::array<std::uint8_t, kPacketSize> bytes{};
  bytes[0] = kSync0;
  bytes[1] = kSync1;
  for (int i = 0; i < 4; ++i)
    bytes[2 + i] = static_cast<std::uint8_t>((packet.seq >> (8 * i)) & 0xFF);
  for (int i = 0; i < kPayloadSamples; ++i) {
    const auto u = static_cast<std::uint16_t>(packet.payload[i]);
    bytes[6 + 2 * i] = static_cast<std::uint8_t>(u & 0xFF);
    bytes[7 + 2 * i] = static_cast<std::uint8_t>((u >> 8) & 0xFF);
  }
  const std::uint16_t crc = crc16_ccitt_false(bytes.data() + 2, 4 + 2 * kPayloadSamples);
  bytes[kPacketSize - 2] = static_cast<std::uint8_t>(crc & 0xFF);
  bytes[kPacketSize - 1] = static_cast<std::uint8_t>((crc >> 8) & 0xFF);
  return bytes;
}

std::array<std::uint8_t, kPacketSize> encode_packet(std::uint32_t seq,
                                                    std::span<const double> samples) {
  if (samples.size() != kPayloadSamples)
    throw parameter_error("encode_packet: need exactly 600 samples");
  SensorPacket packet;
  packet.seq = seq;
  for (int i = 0; i < kPayloadSamples; ++i)
    packet.payload[i] = quantize_sample(samples[static_cast<std::size_t>(i)]);
  return encode_packet(packet);
}

SensorPacket decode_packet(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPacketSize)
    throw truncation_error("packet: " + std::to_string(bytes.size()) + " of " +
                           std::to_string(kPacketSize) + " bytes");
  if (bytes[0] != kSync0 || bytes[1] != kSync1)
    throw framing_error("packet: bad sync bytes");
  const std::uint16_t stored =
      static_cast<std::uint16_t>(bytes[kPacketSize - 2] |
                                 (bytes[kPacketSize - 1] << 8));
  if (crc16_ccitt_false(bytes.data() + 2, 4 + 2 * kPayloadSamples) != stored)
    throw integrity_error("packet: CRC mismatch");
  SensorPacket packet;
  packet.seq = static_cast<std::uint32_t>(bytes[2]) |
               (static_cast<std::uint32_t>(bytes[3]) << 8) |
               (static_cast<std::uint32_t>(bytes[4]) << 16) |
               (static_cast<std::uint32_t>(bytes[5]) << 24);
  for (int i = 0; i < kPayloadSamples; ++i) {
    const std::uint16_t u = static_cast<std::uint16_t>(
        bytes[6 + 2 * i] | (static_cast<std::uint16_t>(bytes[7 + 2 * i]) << 8));
    packet.payload[i] = static_cast<std::int16_t>(u);
  }
  return packet;
}

std::vector<std::uint8_t> encode_capture(const Waveform& w, std::uint32_t first_seq) {
  const Eigen::Index frames = w.samples.size() / kPayloadSamples;
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(frames) * kPacketSize);
  for (Eigen::Index f = 0; f < frames; ++f) {
    const auto packet = encode_packet(
        first_seq + static_cast<std::uint32_t>(f),
        std::span<const double>(w.samples.data() + f * kPayloadSamples,
                                kPayloadSamples));
    bytes.insert(bytes.end(), packet.begin(), packet.end());
  }
  return bytes;
}

void write_capture(const std::filesystem::path& path, const Waveform& w,
                   std::uint32_t first_seq) {
  const auto bytes = encode_capture(w, first_seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path.string());
}

PacketReplay::PacketReplay(const std::filesystem::path& path, double rate_factor,
                           double packets_per_second)
    : in_(path, std::ios::binary),
      rate_factor_(rate_factor),
      packet_interval_s_(1.0 / packets_per_second) {
  if (!in_) throw io_error("cannot open: " + path.string());
  if (rate_factor < 0) throw parameter_error("replay: rate_factor must be >= 0");
  if (packets_per_second <= 0)
    throw parameter_error("replay: packets_per_second must be > 0");
}

std::optional<SensorPacket> PacketReplay::next() {
  std::array<std::uint8_t, kPacketSize> bytes;
  in_.read(reinterpret_cast<char*>(bytes.data()), kPacketSize);
  const std::streamsize got = in_.gcount();
  if (got == 0) return std::nullopt;
  if (got < static_cast<std::streamsize>(kPacketSize)) {
    truncated_ = true;  // torn final packet: warn via flag, end cleanly
    return std::nullopt;
  }
  SensorPacket packet = decode_packet(bytes);

  if (have_prev_seq_ && packet.seq != prev_seq_ + 1)
    gaps_.push_back({prev_seq_, packet.seq,
                     static_cast<std::int64_t>(packet.seq) -
                         static_cast<std::int64_t>(prev_seq_) - 1});
  prev_seq_ = packet.seq;
  have_prev_seq_ = true;

  if (rate_factor_ > 0) {
    if (!started_) {
      epoch_ = std::chrono::steady_clock::now();
      started_ = true;
    }
    const double due_s =
        static_cast<double>(emitted_) * packet_interval_s_ / rate_factor_;
    std::this_thread::sleep_until(
        epoch_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(due_s)));
  }
  ++emitted_;
  return packet;
}

}  // namespace rap
