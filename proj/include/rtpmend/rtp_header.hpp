#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace rtpmend {

// Fixed part of the RTP header (RFC 3550), the unit this library matches
// and repairs:
//
//    0                   1                   2                   3
//    0 1 2 3 4 5 6 7 8 9 0 1 2 3 4 5 6 7 8 9 0 1 2 3 4 5 6 7 8 9 0 1
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//   |V=2|P|X|  CC   |M|     PT      |       sequence number         |
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//   |                           timestamp                           |
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//   |           synchronization source (SSRC) identifier            |
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//
// CSRC lists are not modeled: senders in this library always emit CC=0
// (CSRC support is marginal in practice), and receiving code never
// consumes CSRC words. Parsing still reads whatever CC value the bits
// contain so that corrupted headers stay representable.

inline constexpr std::size_t kFixedHeaderSize = 12;  // octets
inline constexpr std::size_t kFixedHeaderBits = kFixedHeaderSize * 8;

using HeaderBytes = std::array<std::uint8_t, kFixedHeaderSize>;

struct RtpHeader {
  std::uint8_t version = 2;        // 2 bits
  bool padding = false;            // P
  bool extension = false;          // X
  std::uint8_t csrc_count = 0;     // CC, 4 bits
  bool marker = false;             // M
  std::uint8_t payload_type = 0;   // PT, 7 bits
  std::uint16_t sequence_number = 0;
  std::uint32_t timestamp = 0;
  std::uint32_t ssrc = 0;

  friend bool operator==(const RtpHeader&, const RtpHeader&) = default;
};

/// Encode the fixed header, network byte order. Fields are masked to
/// their wire widths, which makes serialize(parse(x)) == x for every
/// 12-octet string x.
inline HeaderBytes serialize(const RtpHeader& h) {
  HeaderBytes out{};
  out[0] = static_cast<std::uint8_t>((h.version & 0x03u) << 6 |
                                     (h.padding ? 0x20u : 0u) |
                                     (h.extension ? 0x10u : 0u) |
                                     (h.csrc_count & 0x0Fu));
  out[1] = static_cast<std::uint8_t>((h.marker ? 0x80u : 0u) |
                                     (h.payload_type & 0x7Fu));
  out[2] = static_cast<std::uint8_t>(h.sequence_number >> 8);
  out[3] = static_cast<std::uint8_t>(h.sequence_number);
  out[4] = static_cast<std::uint8_t>(h.timestamp >> 24);
  out[5] = static_cast<std::uint8_t>(h.timestamp >> 16);
  out[6] = static_cast<std::uint8_t>(h.timestamp >> 8);
  out[7] = static_cast<std::uint8_t>(h.timestamp);
  out[8] = static_cast<std::uint8_t>(h.ssrc >> 24);
  out[9] = static_cast<std::uint8_t>(h.ssrc >> 16);
  out[10] = static_cast<std::uint8_t>(h.ssrc >> 8);
  out[11] = static_cast<std::uint8_t>(h.ssrc);
  return out;
}

/// Decode the first 12 octets. Value-lenient: corrupted inputs (wrong
/// version, nonzero CC, ...) parse fine; only a short buffer is an error.
inline RtpHeader parse(std::span<const std::uint8_t> octets) {
  if (octets.size() < kFixedHeaderSize) {
    throw std::length_error("rtp header: need at least 12 octets");
  }
  RtpHeader h;
  h.version = static_cast<std::uint8_t>(octets[0] >> 6);
  h.padding = (octets[0] & 0x20u) != 0;
  h.extension = (octets[0] & 0x10u) != 0;
  h.csrc_count = static_cast<std::uint8_t>(octets[0] & 0x0Fu);
  h.marker = (octets[1] & 0x80u) != 0;
  h.payload_type = static_cast<std::uint8_t>(octets[1] & 0x7Fu);
  h.sequence_number =
      static_cast<std::uint16_t>(octets[2] << 8 | octets[3]);
  h.timestamp = static_cast<std::uint32_t>(octets[4]) << 24 |
                static_cast<std::uint32_t>(octets[5]) << 16 |
                static_cast<std::uint32_t>(octets[6]) << 8 |
                static_cast<std::uint32_t>(octets[7]);
  h.ssrc = static_cast<std::uint32_t>(octets[8]) << 24 |
           static_cast<std::uint32_t>(octets[9]) << 16 |
           static_cast<std::uint32_t>(octets[10]) << 8 |
           static_cast<std::uint32_t>(octets[11]);
  return h;
}

enum class Field {
  kVersion,
  kPadding,
  kExtension,
  kCsrcCount,
  kMarker,
  kPayloadType,
  kSequenceNumber,
  kTimestamp,
  kSsrc,
};

// How a header field behaves over the lifetime of a stream, which decides
// whether a corrupted value can be reconstructed:
//   Static              - constant per stream (or globally), trivially repairable
//   PredictablyDynamic  - changes per packet but follows a learnable progression
//   UnpredictablyDynamic- changes irregularly; errors here are unrecoverable
enum class FieldClass {
  kStatic,
  kPredictablyDynamic,
  kUnpredictablyDynamic,
};

// The unpredictable bits are P, X, CC (4 bits), and M: 7 of the 96.
inline constexpr std::size_t kUnpredictableBits = 7;

inline FieldClass field_class(Field f) {
  switch (f) {
    case Field::kVersion:
    case Field::kPayloadType:  // changes are rare enough to treat as static
    case Field::kSsrc:
      return FieldClass::kStatic;
    case Field::kSequenceNumber:
    case Field::kTimestamp:
      return FieldClass::kPredictablyDynamic;
    case Field::kPadding:
    case Field::kExtension:
    case Field::kCsrcCount:
    case Field::kMarker:
      return FieldClass::kUnpredictablyDynamic;
  }
  throw std::invalid_argument("field_class: unknown field");
}

}  // namespace rtpmend
