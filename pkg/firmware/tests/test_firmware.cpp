// Firmware tests: protocol agreement with the host via the shared vector
// file, parser resync, and servo-range safety under fuzzed serial streams.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gesture_player.hpp"
#include "wire_protocol.hpp"

#ifndef CONFORMANCE_VECTORS
#error "CONFORMANCE_VECTORS must point at the shared vector file"
#endif

namespace {

struct Vector {
  std::vector<uint8_t> data;
  std::string expected;
};

std::vector<uint8_t> from_hex(const std::string& hex) {
  std::vector<uint8_t> out;
  for (size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<uint8_t>(
        std::stoul(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

std::vector<Vector> load_vectors() {
  std::ifstream file(CONFORMANCE_VECTORS);
  REQUIRE_MESSAGE(file.good(), "cannot open " CONFORMANCE_VECTORS);
  std::vector<Vector> vectors;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string hex, expected;
    row >> hex >> expected;
    if (hex.empty() || expected.empty()) continue;
    vectors.push_back({from_hex(hex), expected});
  }
  return vectors;
}

std::string outcome_name(const wire::DecodeResult& result) {
  switch (result.status) {
    case wire::Status::kOk:
      switch (result.sentiment) {
        case 'a': return "greeting";
        case 'b': return "happy";
        case 'c': return "sad";
        case 'd': return "serious";
        case 'e': return "dance";
      }
      return "invalid";
    case wire::Status::kBadSync: return "BadSync";
    case wire::Status::kBadChecksum: return "BadChecksum";
    case wire::Status::kUnknownSentiment: return "UnknownSentiment";
    case wire::Status::kTruncated: return "Truncated";
  }
  return "invalid";
}

// Primary (first) classification of an isolated byte sequence fed through
// the stream parser, matching how the host defines vector agreement.
std::string stream_primary(const std::vector<uint8_t>& data) {
  wire::FrameParser parser;
  wire::DecodeResult result;
  for (uint8_t byte : data) {
    if (parser.push(byte, &result)) return outcome_name(result);
  }
  if (parser.finish(&result)) return outcome_name(result);
  return "none";
}

}  // namespace

TEST_CASE("conformance vectors cover all payloads and error classes") {
  const auto vectors = load_vectors();
  CHECK(vectors.size() >= 20);
}

TEST_CASE("single-frame decoder matches the shared vectors") {
  for (const auto& vector : load_vectors()) {
    const auto result = wire::decode_frame(vector.data.data(),
                                           vector.data.size());
    CHECK_MESSAGE(outcome_name(result) == vector.expected,
                  "frame expected ", vector.expected);
  }
}

TEST_CASE("byte-at-a-time parser matches the shared vectors") {
  for (const auto& vector : load_vectors()) {
    CHECK_MESSAGE(stream_primary(vector.data) == vector.expected,
                  "stream expected ", vector.expected);
  }
}

TEST_CASE("parser resynchronizes after corruption") {
  wire::FrameParser parser;
  wire::DecodeResult result;
  std::vector<std::string> outcomes;
  // Garbage, a corrupted frame (bad checksum), then a valid dance frame.
  const uint8_t stream[] = {
      0x13, 0x37,
      0x7E, 0x01, 0x01, 0x62, 0x00,
      0x7E, 0x01, 0x01, 0x65, 0x65,
  };
  for (uint8_t byte : stream) {
    if (parser.push(byte, &result)) outcomes.push_back(outcome_name(result));
  }
  REQUIRE(!outcomes.empty());
  CHECK(outcomes.front() == "BadSync");
  CHECK(outcomes.back() == "dance");
  CHECK(parser.pending() == 0);
}

TEST_CASE("recovers a frame whose sync overlaps a bad header") {
  wire::FrameParser parser;
  wire::DecodeResult result;
  std::vector<std::string> outcomes;
  const uint8_t stream[] = {0x7E, 0x7E, 0x01, 0x01, 0x62, 0x62};
  for (uint8_t byte : stream) {
    if (parser.push(byte, &result)) outcomes.push_back(outcome_name(result));
  }
  CHECK(outcomes.back() == "happy");
}

TEST_CASE("servo targets stay in range under a fuzzed serial stream") {
  std::mt19937 rng(0xF1237u);
  std::uniform_int_distribution<int> byte_dist(0, 255);
  std::uniform_int_distribution<int> len_dist(0, 9);
  std::uniform_int_distribution<int> gesture_dist(0, 4);

  wire::FrameParser parser;
  gesture::GesturePlayer player(/*seed=*/0xB07u);
  wire::DecodeResult result;
  uint32_t now = 0;

  for (int burst = 0; burst < 500; ++burst) {
    std::vector<uint8_t> chunk;
    for (int i = len_dist(rng); i > 0; --i) {
      chunk.push_back(static_cast<uint8_t>(byte_dist(rng)));
    }
    if (burst % 3 == 0) {  // sprinkle valid frames into the noise
      const char sentiment = static_cast<char>('a' + gesture_dist(rng));
      const uint8_t payload = static_cast<uint8_t>(sentiment);
      const uint8_t frame[] = {0x7E, 0x01, 0x01, payload,
                               static_cast<uint8_t>(0x01 ^ 0x01 ^ payload)};
      chunk.insert(chunk.end(), frame, frame + 5);
    }
    for (uint8_t byte : chunk) {
      if (parser.push(byte, &result) && result.status == wire::Status::kOk) {
        player.start(result.sentiment, now);
      }
    }
    for (int tick = 0; tick < 5; ++tick) {
      now += 20;
      player.update(now);
      for (int j = 0; j < gestures::kNumJoints; ++j) {
        CHECK(player.pose()[j] >= gesture::kServoMinDeg);
        CHECK(player.pose()[j] <= gesture::kServoMaxDeg);
      }
    }
  }
}

TEST_CASE("jitter respects amplitude and timing bounds") {
  gesture::GesturePlayer player(/*seed=*/42u);
  for (int g = 0; g < gestures::kNumGestures; ++g) {
    player.start(static_cast<char>('a' + g), 0);
    float base_ms = 0.0f;
    for (int k = 0; k < gestures::kKeyframeCounts[g]; ++k) {
      base_ms += gestures::kTable[g][k].hold_ms;
    }
    const float lo = base_ms * (1.0f - gesture::kMaxTimeFrac)
                     + gestures::kIdle.hold_ms;
    const float hi = base_ms * (1.0f + gesture::kMaxTimeFrac)
                     + gestures::kIdle.hold_ms;
    CHECK(player.duration_ms() >= lo - 1e-3f);
    CHECK(player.duration_ms() <= hi + 1e-3f);
  }
}

TEST_CASE("every gesture parks the chassis at idle") {
  gesture::GesturePlayer player(/*seed=*/7u);
  for (int g = 0; g < gestures::kNumGestures; ++g) {
    player.start(static_cast<char>('a' + g), 0);
    uint32_t now = 0;
    while (player.active()) {
      now += 20;
      player.update(now);
    }
    for (int j = 0; j < gestures::kNumJoints; ++j) {
      CHECK(player.pose()[j] == doctest::Approx(gesture::kIdleDeg).epsilon(0.01));
    }
  }
}
