#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rtpmend/matcher.hpp"
#include "rtpmend/rtp_header.hpp"
#include "rtpmend/stream_db.hpp"

namespace rtpmend {

// A packet as handed up by an error-tolerant network stack: raw bytes plus
// a conservative corruption flag (set whenever any lower-layer checksum
// failed, so an error-free flag is trustworthy).
struct IncomingPacket {
  std::vector<std::uint8_t> octets;
  bool has_errors = false;
};

/// Overwrite a received header with the expected one. Every received
/// header bit is discarded; downstream routines see a coherent header
/// even when the wire bits were garbage. The received octets parameter
/// documents what is being replaced and is intentionally unused.
inline RtpHeader repair([[maybe_unused]] std::span<const std::uint8_t> received,
                        const ExpectedHeader& expected) {
  return parse(expected.octets);
}

enum class DropReason {
  kNoStreams,   // corrupted packet but nothing learned yet
  kOverCutoff,  // best match farther than the configured cutoff
  kTooShort,    // fewer than 12 octets, no fixed header to work with
};

// Per-packet outcome of the receive pipeline. Drops are results, not
// failures.
struct DeliveryResult {
  struct Delivered {
    std::uint32_t ssrc = 0;
    RtpHeader header;  // repaired when the input was corrupted
    std::vector<std::uint8_t> payload;
    bool was_repaired = false;
  };
  struct DroppedPacket {
    DropReason reason;
  };

  std::variant<Delivered, DroppedPacket> outcome;

  bool is_delivered() const {
    return std::holds_alternative<Delivered>(outcome);
  }
  const Delivered& delivered() const { return std::get<Delivered>(outcome); }
  const DroppedPacket& dropped() const {
    return std::get<DroppedPacket>(outcome);
  }
};

// Receive-side pipeline: error-free packets feed the learner and pass
// through untouched; corrupted packets are matched against every stream's
// expected next header, repaired to the best match, and delivered with
// their payload bits verbatim. One Receiver per RTP session; calls are
// strictly sequential.
class Receiver {
 public:
  DeliveryResult receive(const IncomingPacket& packet,
                         std::optional<std::size_t> cutoff = std::nullopt) {
    if (packet.octets.size() < kFixedHeaderSize) {
      return {DeliveryResult::DroppedPacket{DropReason::kTooShort}};
    }
    const auto header_bytes =
        std::span<const std::uint8_t>(packet.octets).first(kFixedHeaderSize);
    std::vector<std::uint8_t> payload(
        packet.octets.begin() + kFixedHeaderSize, packet.octets.end());

    if (!packet.has_errors) {
      const RtpHeader header = parse(header_bytes);
      db_.learn(header);
      return {DeliveryResult::Delivered{header.ssrc, header,
                                        std::move(payload), false}};
    }

    const MatchDecision decision =
        best_match(header_bytes, db_.snapshot(), cutoff);
    if (!decision.is_assigned()) {
      const auto& drop = decision.dropped();
      if (drop.closest_ssrc) {
        // The closest stream's true sequence advanced whether or not we
        // deliver this packet; its counter must advance too or every
        // later prediction for it lags behind.
        db_.record_bad(*drop.closest_ssrc);
        return {DeliveryResult::DroppedPacket{DropReason::kOverCutoff}};
      }
      return {DeliveryResult::DroppedPacket{DropReason::kNoStreams}};
    }

    const auto& assigned = decision.assigned();
    const ExpectedHeader expected = predict_expected(*db_.find(assigned.ssrc));
    const RtpHeader repaired = repair(header_bytes, expected);
    db_.record_bad(assigned.ssrc);
    return {DeliveryResult::Delivered{assigned.ssrc, repaired,
                                      std::move(payload), true}};
  }

  const StreamDb& streams() const { return db_; }

 private:
  StreamDb db_;
};

}  // namespace rtpmend
