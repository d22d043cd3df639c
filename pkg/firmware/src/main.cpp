// Reference firmware superloop, host-buildable.
//
// Reads command frames byte-at-a-time from a serial device (or stdin),
// validates them with the shared codec rules, and plays the matching
// gesture on 7 servo channels. On a real board the read() below maps to
// the UART receive buffer, millis() to the board clock, and write_servos()
// to the PWM driver; everything else is identical.

#include <chrono>
#include <cstdio>
#include <fcntl.h>
#include <thread>
#include <unistd.h>

#include "gesture_player.hpp"
#include "wire_protocol.hpp"

namespace {

uint32_t millis() {
  using namespace std::chrono;
  static const auto t0 = steady_clock::now();
  return static_cast<uint32_t>(
      duration_cast<milliseconds>(steady_clock::now() - t0).count());
}

void write_servos(const float* pose) {
  // PWM output stub: print targets so a scope/log can watch the motion.
  std::printf("servos");
  for (int j = 0; j < gestures::kNumJoints; ++j) {
    std::printf(" %6.1f", pose[j]);
  }
  std::printf("\n");
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const char* port = argc > 1 ? argv[1] : nullptr;
  int fd = STDIN_FILENO;
  if (port != nullptr) {
    fd = ::open(port, O_RDONLY | O_NONBLOCK);
    if (fd < 0) {
      std::fprintf(stderr, "cannot open %s\n", port);
      return 1;
    }
  }

  wire::FrameParser parser;
  gesture::GesturePlayer player(/*seed=*/millis() + 0xB07u);
  uint8_t byte = 0;
  uint32_t last_write = 0;

  for (;;) {
    ssize_t n = ::read(fd, &byte, 1);
    if (n == 1) {
      wire::DecodeResult result;
      if (parser.push(byte, &result) && result.status == wire::Status::kOk) {
        player.start(result.sentiment, millis());
      }
    } else if (n == 0 && port == nullptr) {
      // stdin closed (a board's UART never EOFs): finish any active
      // gesture so piped demos still show the motion, then exit.
      if (!player.active()) break;
    }

    player.update(millis());
    const uint32_t now = millis();
    if (player.active() && now - last_write >= 20) {  // 50 Hz servo update
      write_servos(player.pose());
      last_write = now;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return 0;
}
