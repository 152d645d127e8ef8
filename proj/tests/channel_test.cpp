#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rtpmend/channel.hpp"

using namespace rtpmend;

TEST_CASE("corrupt at the degenerate rates", "[channel]") {
  const std::vector<std::uint8_t> input = {0x00, 0xFF, 0xA5, 0x3C};

  SECTION("ber 0 is the identity") {
    Corruptor c({0.0, 123});
    const CorruptResult r = c.corrupt(input);
    CHECK(r.octets == input);
    CHECK(r.flipped_bits == 0);
  }

  SECTION("ber 1 is the bitwise complement") {
    Corruptor c({1.0, 123});
    const CorruptResult r = c.corrupt(input);
    const std::vector<std::uint8_t> complement = {0xFF, 0x00, 0x5A, 0xC3};
    CHECK(r.octets == complement);
    CHECK(r.flipped_bits == 8 * input.size());
  }

  SECTION("ber outside [0, 1] is rejected") {
    CHECK_THROWS_AS(Corruptor({1.5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Corruptor({-0.1, 0}), std::invalid_argument);
  }
}

TEST_CASE("corrupt is reproducible and length-preserving", "[channel]") {
  const std::vector<std::uint8_t> input(57, 0x77);
  Corruptor a({0.25, 98765});
  Corruptor b({0.25, 98765});
  const CorruptResult ra = a.corrupt(input);
  const CorruptResult rb = b.corrupt(input);
  CHECK(ra.octets == rb.octets);
  CHECK(ra.flipped_bits == rb.flipped_bits);
  CHECK(ra.octets.size() == input.size());

  Corruptor other({0.25, 98766});
  CHECK(other.corrupt(input).octets != ra.octets);
}

TEST_CASE("flip counts follow binomial statistics", "[channel][property]") {
  // 10 000 fixed headers at ber 0.1: mean flips per header is n*p = 9.6;
  // the aggregate mean lands well inside +/- 0.3.
  Corruptor c({0.1, 4242});
  const std::vector<std::uint8_t> header(12, 0x00);
  std::uint64_t total_flips = 0;
  const int packets = 10000;
  for (int i = 0; i < packets; ++i) {
    total_flips += c.corrupt(header).flipped_bits;
  }
  const double mean = static_cast<double>(total_flips) / packets;
  CHECK(mean > 9.3);
  CHECK(mean < 9.9);
}

TEST_CASE("make_packet produces the configured progression", "[channel]") {
  StreamParams stream;
  stream.ssrc = 0xCAFEBABE;
  stream.initial_seq = 500;
  stream.initial_ts = 80000;
  stream.ts_increment = 160;

  SECTION("index 0 is the initial point") {
    const SentPacket p = make_packet(stream, 0, 32);
    CHECK(p.ground_truth_header.sequence_number == 500);
    CHECK(p.ground_truth_header.timestamp == 80000);
    CHECK(p.ground_truth_ssrc == 0xCAFEBABE);
  }

  SECTION("index advances seq by one and ts by the increment") {
    const SentPacket p = make_packet(stream, 2, 32);
    CHECK(p.ground_truth_header.sequence_number == 502);
    CHECK(p.ground_truth_header.timestamp == 80320);
  }

  SECTION("consecutive packets differ in seq by exactly 1") {
    for (std::uint32_t i = 0; i < 10; ++i) {
      const SentPacket a = make_packet(stream, i, 0);
      const SentPacket b = make_packet(stream, i + 1, 0);
      CHECK(static_cast<std::uint16_t>(
                b.ground_truth_header.sequence_number -
                a.ground_truth_header.sequence_number) == 1);
    }
  }

  SECTION("octets begin with the serialized ground-truth header") {
    const SentPacket p = make_packet(stream, 3, 16);
    REQUIRE(p.octets.size() == 12 + 16);
    const HeaderBytes wire = serialize(p.ground_truth_header);
    CHECK(std::equal(wire.begin(), wire.end(), p.octets.begin()));
  }

  SECTION("header carries version 2, clear flags, CC 0") {
    const RtpHeader& h = make_packet(stream, 0, 0).ground_truth_header;
    CHECK(h.version == 2);
    CHECK_FALSE(h.padding);
    CHECK_FALSE(h.extension);
    CHECK(h.csrc_count == 0);
    CHECK_FALSE(h.marker);
  }

  SECTION("payload filler is deterministic in (ssrc, index)") {
    const SentPacket a = make_packet(stream, 7, 64);
    const SentPacket b = make_packet(stream, 7, 64);
    CHECK(a.octets == b.octets);
    const SentPacket c = make_packet(stream, 8, 64);
    CHECK(std::vector<std::uint8_t>(a.octets.begin() + 12, a.octets.end()) !=
          std::vector<std::uint8_t>(c.octets.begin() + 12, c.octets.end()));
  }

  SECTION("sequence number wraps") {
    stream.initial_seq = 0xFFFF;
    const SentPacket p = make_packet(stream, 1, 0);
    CHECK(p.ground_truth_header.sequence_number == 0);
  }
}

TEST_CASE("mix_seed derives distinct sub-seeds", "[channel]") {
  CHECK(mix_seed(42, 1) != mix_seed(42, 2));
  CHECK(mix_seed(42, 1, 0) != mix_seed(43, 1, 0));
  CHECK(mix_seed(42, 1, 2, 3) == mix_seed(42, 1, 2, 3));
  CHECK(mix_seed(42, 1, 2, 3) != mix_seed(42, 1, 3, 2));
}
