// Command-frame decoding for the motor controller, mirroring the host codec
// byte for byte. A frame is [0x7E][0x01 version][0x01 len][payload][checksum]
// where checksum = version ^ len ^ payload and payload is 'a'..'e'.
#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>

namespace wire {

constexpr uint8_t kSync = 0x7E;
constexpr uint8_t kVersion = 0x01;
constexpr uint8_t kPayloadLen = 0x01;
constexpr size_t kFrameLen = 5;

enum class Status : uint8_t {
  kOk,
  kBadSync,           // sync byte or header field not a v1 frame
  kBadChecksum,
  kUnknownSentiment,  // payload outside 'a'..'e'
  kTruncated,
};

struct DecodeResult {
  Status status;
  char sentiment;  // valid only when status == kOk
  uint8_t offset;  // offending byte offset for errors
};

// Validation order matches the host: truncation, sync, header fields,
// checksum, payload range.
inline DecodeResult decode_frame(const uint8_t* data, size_t len) {
  if (len < kFrameLen) {
    return {Status::kTruncated, 0, static_cast<uint8_t>(len)};
  }
  if (data[0] != kSync) return {Status::kBadSync, 0, 0};
  if (data[1] != kVersion) return {Status::kBadSync, 0, 1};
  if (data[2] != kPayloadLen) return {Status::kBadSync, 0, 2};
  const uint8_t expected = data[1] ^ data[2] ^ data[3];
  if (data[4] != expected) return {Status::kBadChecksum, 0, 4};
  if (data[3] < 'a' || data[3] > 'e') {
    return {Status::kUnknownSentiment, 0, 3};
  }
  return {Status::kOk, static_cast<char>(data[3]), 0};
}

// Byte-at-a-time parser with resync: after any error the sync byte that
// opened the bad frame is dropped and scanning restarts inside the
// remainder, so a valid frame following corruption is still accepted.
class FrameParser {
 public:
  // Feed one byte. Returns true when `out` holds a new classification
  // (a decoded frame or a classified error).
  bool push(uint8_t byte, DecodeResult* out) {
    if (len_ == 0) {
      if (byte != kSync) {
        if (in_garbage_) return false;  // one BadSync per garbage run
        in_garbage_ = true;
        *out = {Status::kBadSync, 0, 0};
        return true;
      }
      in_garbage_ = false;
      buf_[len_++] = byte;
      return false;
    }
    buf_[len_++] = byte;
    if (len_ < kFrameLen) return false;
    *out = decode_frame(buf_, kFrameLen);
    if (out->status == Status::kOk) {
      len_ = 0;
    } else {
      resync_();
    }
    return true;
  }

  // End of stream: a partially buffered frame is reported as truncated.
  bool finish(DecodeResult* out) {
    if (len_ == 0) return false;
    *out = {Status::kTruncated, 0, len_};
    len_ = 0;
    return true;
  }

  uint8_t pending() const { return len_; }

 private:
  void resync_() {
    // Drop buf_[0] (the sync byte) and keep anything from the next sync on.
    for (uint8_t i = 1; i < len_; ++i) {
      if (buf_[i] == kSync) {
        std::memmove(buf_, buf_ + i, len_ - i);
        len_ = static_cast<uint8_t>(len_ - i);
        return;
      }
    }
    len_ = 0;
  }

  uint8_t buf_[kFrameLen] = {0};
  uint8_t len_ = 0;
  bool in_garbage_ = false;
};

}  // namespace wire
