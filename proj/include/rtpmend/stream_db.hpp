#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rtpmend/rtp_header.hpp"

namespace rtpmend {

// Per-stream state learned from error-free packets. The matcher derives
// expected next headers from this; see matcher.hpp.
struct StreamState {
  std::uint32_t ssrc = 0;
  RtpHeader last_header;            // most recent error-free header
  std::uint32_t sampling_rate = 0;  // timestamp units per sequence step
  std::uint64_t bad_packet_counter = 0;  // corrupted packets attributed
                                         // since the last correct one
  std::uint64_t correct_count = 0;
  std::uint64_t corrupted_count = 0;
};

// The learner half of the recovery pipeline: stores the last correct
// header per SSRC and the sampling rate between consecutive correct
// packets, and tracks how many corrupted packets each stream absorbed.
//
// Single-writer contract: all mutation happens from one packet-processing
// sequence. snapshot() readers must not overlap with mutation.
class StreamDb {
 public:
  /// Record an error-free header. Creates the stream on first sight
  /// (sampling rate 0 until a second packet arrives); otherwise derives
  /// the sampling rate from the wrapping seq/ts deltas, replaces the
  /// stored header, and resets the bad packet counter.
  void learn(const RtpHeader& header) {
    StreamState* state = find_mutable(header.ssrc);
    if (state == nullptr) {
      StreamState fresh;
      fresh.ssrc = header.ssrc;
      fresh.last_header = header;
      fresh.correct_count = 1;
      states_.push_back(fresh);
      return;
    }
    const std::uint16_t seq_delta = static_cast<std::uint16_t>(
        header.sequence_number - state->last_header.sequence_number);
    const std::uint32_t ts_delta =
        header.timestamp - state->last_header.timestamp;
    if (seq_delta != 0) {
      // Regular pacing divides evenly; when it does not (irregular
      // sender or wrap artifact) we truncate and count the event.
      if (ts_delta % seq_delta != 0) {
        ++uneven_rate_divisions_;
      }
      state->sampling_rate = ts_delta / seq_delta;
    }
    state->last_header = header;
    state->bad_packet_counter = 0;
    ++state->correct_count;
  }

  /// Count a corrupted packet against a stream that best_match assigned
  /// it to. Unknown SSRCs are a caller bug, not a recoverable condition.
  void record_bad(std::uint32_t ssrc) {
    StreamState* state = find_mutable(ssrc);
    if (state == nullptr) {
      throw std::out_of_range("record_bad: unknown ssrc");
    }
    ++state->bad_packet_counter;
    ++state->corrupted_count;
  }

  /// Immutable view of all current streams, in creation order.
  std::span<const StreamState> snapshot() const { return states_; }

  const StreamState* find(std::uint32_t ssrc) const {
    for (const StreamState& s : states_) {
      if (s.ssrc == ssrc) return &s;
    }
    return nullptr;
  }

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }

  /// Times learn() saw a ts/seq delta pair that did not divide evenly.
  std::uint64_t uneven_rate_divisions() const {
    return uneven_rate_divisions_;
  }

 private:
  StreamState* find_mutable(std::uint32_t ssrc) {
    for (StreamState& s : states_) {
      if (s.ssrc == ssrc) return &s;
    }
    return nullptr;
  }

  std::vector<StreamState> states_;
  std::uint64_t uneven_rate_divisions_ = 0;
};

}  // namespace rtpmend
