#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rtpmend/rtp_header.hpp"

namespace rtpmend {

namespace detail {

// splitmix64: tiny, well-mixed generator used for seed derivation and
// payload filler. Fully specified here so results are identical across
// platforms and standard libraries.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
// std::uniform_real_distribution is implementation-defined; this mapping
// keeps corruption bit-reproducible across toolchains.
template <typename Urbg>
double unit_uniform(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Derive an independent sub-seed from up to four words (master seed,
/// parameter values, repetition index, ...) by feeding them through a
/// splitmix chain.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
  detail::SplitMix64 mixer(a);
  std::uint64_t out = mixer.next();
  for (std::uint64_t word : {b, c, d}) {
    mixer.state ^= word;
    out = mixer.next();
  }
  return out;
}

struct ChannelConfig {
  double ber = 0.0;        // per-bit flip probability, in [0, 1]
  std::uint64_t seed = 0;  // RNG seed for this channel instance
};

struct CorruptResult {
  std::vector<std::uint8_t> octets;
  std::size_t flipped_bits = 0;
};

// The packet destroyer: an independent Bernoulli trial per bit. For each
// bit it draws a uniform number in [0, 1) and flips the bit iff the number
// is below the configured error rate. Length is never changed.
class Corruptor {
 public:
  explicit Corruptor(const ChannelConfig& config)
      : ber_(config.ber), rng_(config.seed) {
    if (config.ber < 0.0 || config.ber > 1.0) {
      throw std::invalid_argument("Corruptor: ber must be in [0, 1]");
    }
  }

  CorruptResult corrupt(std::vector<std::uint8_t> packet) {
    std::size_t flipped = 0;
    for (std::uint8_t& octet : packet) {
      for (int bit = 7; bit >= 0; --bit) {
        if (detail::unit_uniform(rng_) < ber_) {
          octet ^= static_cast<std::uint8_t>(1u << bit);
          ++flipped;
        }
      }
    }
    return {std::move(packet), flipped};
  }

 private:
  double ber_;
  std::mt19937_64 rng_;
};

// Sender-side parameters of one stream. Defaults model 8 kHz / 20 ms
// narrowband voice frames (160 timestamp units and 160 payload octets per
// packet); both are configurable.
struct StreamParams {
  std::uint32_t ssrc = 0;
  std::uint16_t initial_seq = 0;
  std::uint32_t initial_ts = 0;
  std::uint8_t payload_type = 0;
  std::uint32_t ts_increment = 160;
};

// A packet as it left the sender, with the ground truth kept alongside for
// metrics. The receiver under test never sees anything but the octets.
struct SentPacket {
  std::vector<std::uint8_t> octets;
  std::uint32_t ground_truth_ssrc = 0;
  RtpHeader ground_truth_header;
};

/// Build the index-th packet of a stream: version 2, flags clear, CC 0,
/// sequence number and timestamp advanced from the stream's initial
/// values. The payload is deterministic filler derived from (ssrc, index)
/// so corrupted payload bits are detectable against a recomputed original.
inline SentPacket make_packet(const StreamParams& stream, std::uint32_t index,
                              std::size_t payload_size) {
  RtpHeader header;
  header.payload_type = stream.payload_type;
  header.sequence_number =
      static_cast<std::uint16_t>(stream.initial_seq + index);
  header.timestamp = stream.initial_ts + index * stream.ts_increment;
  header.ssrc = stream.ssrc;

  SentPacket packet;
  packet.ground_truth_ssrc = stream.ssrc;
  packet.ground_truth_header = header;
  packet.octets.reserve(kFixedHeaderSize + payload_size);
  const HeaderBytes wire = serialize(header);
  packet.octets.assign(wire.begin(), wire.end());

  detail::SplitMix64 filler(
      mix_seed(stream.ssrc, index, 0x706C6F6164ull));  // "pload"
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < payload_size; ++i) {
    if (i % 8 == 0) word = filler.next();
    packet.octets.push_back(static_cast<std::uint8_t>(word >> (8 * (i % 8))));
  }
  return packet;
}

}  // namespace rtpmend
