#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>

#include "rtpmend/rtp_header.hpp"
#include "rtpmend/stream_db.hpp"

namespace rtpmend {

/// Number of differing bit positions between two equal-length octet
/// strings. This is the matcher's whole similarity metric: cheap,
/// position-independent, and directly proportional to the number of bit
/// errors that separate the strings.
inline std::size_t hamming(std::span<const std::uint8_t> a,
                           std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming: length mismatch");
  }
  std::size_t bits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    bits += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  }
  return bits;
}

// The 12 octets a stream expects its next packet's fixed header to carry.
struct ExpectedHeader {
  HeaderBytes octets;
  std::uint32_t source_ssrc = 0;
};

/// Build the expected next header for a stream: every field keeps its
/// last-learned value except sequence number and timestamp, which advance
/// by one step per corrupted packet already attributed plus one for the
/// packet being matched now. That "+ 1" is the entire offset rule and
/// lives only here: a bad packet counter of 0 means the last correct
/// packet was the previous one, so the next packet is one step ahead.
inline ExpectedHeader predict_expected(const StreamState& state) {
  const std::uint32_t steps =
      static_cast<std::uint32_t>(state.bad_packet_counter) + 1;
  RtpHeader next = state.last_header;
  next.sequence_number =
      static_cast<std::uint16_t>(next.sequence_number + steps);
  next.timestamp += steps * state.sampling_rate;
  return ExpectedHeader{serialize(next), state.ssrc};
}

// Outcome of matching one received header against the stream set.
struct MatchDecision {
  struct Assigned {
    std::uint32_t ssrc = 0;
    std::size_t distance = 0;
  };
  struct Dropped {
    // Both fields are absent exactly when the stream set was empty.
    std::optional<std::size_t> min_distance;
    std::optional<std::uint32_t> closest_ssrc;
  };

  std::variant<Assigned, Dropped> outcome;

  bool is_assigned() const {
    return std::holds_alternative<Assigned>(outcome);
  }
  const Assigned& assigned() const { return std::get<Assigned>(outcome); }
  const Dropped& dropped() const { return std::get<Dropped>(outcome); }
};

/// Find the stream whose expected next header is closest (in Hamming
/// distance) to the received 12 octets. With a cutoff configured, a best
/// match farther than the cutoff is dropped instead of assigned; distance
/// equal to the cutoff is still accepted. Ties on distance go to the
/// numerically smallest SSRC, so the result does not depend on the order
/// of the states collection.
inline MatchDecision best_match(std::span<const std::uint8_t> received,
                                std::span<const StreamState> states,
                                std::optional<std::size_t> cutoff) {
  const StreamState* best = nullptr;
  std::size_t best_distance = 0;
  for (const StreamState& state : states) {
    const ExpectedHeader expected = predict_expected(state);
    const std::size_t distance = hamming(received, expected.octets);
    if (best == nullptr || distance < best_distance ||
        (distance == best_distance && state.ssrc < best->ssrc)) {
      best = &state;
      best_distance = distance;
    }
  }
  if (best == nullptr) {
    return MatchDecision{MatchDecision::Dropped{}};
  }
  if (cutoff && best_distance > *cutoff) {
    return MatchDecision{
        MatchDecision::Dropped{best_distance, best->ssrc}};
  }
  return MatchDecision{MatchDecision::Assigned{best->ssrc, best_distance}};
}

}  // namespace rtpmend
