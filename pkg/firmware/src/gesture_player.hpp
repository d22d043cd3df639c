// Gesture playback for the 7-servo chassis: compiled-in keyframe tables
// (generated from the host data file), bounded LCG jitter, and linear
// interpolation toward each keyframe. All servo targets are clamped to
// [0, 180] degrees no matter what the jitter draws.
#pragma once

#include <cstdint>

#include "gestures_table.h"

namespace gesture {

constexpr float kServoMinDeg = 0.0f;
constexpr float kServoMaxDeg = 180.0f;
constexpr float kIdleDeg = 90.0f;
constexpr float kMaxJitterDeg = 5.0f;
constexpr float kMaxTimeFrac = 0.1f;
// Base keyframes + appended idle pose.
constexpr int kMaxWaypoints = 16;

inline float clamp_deg(float deg) {
  if (deg < kServoMinDeg) return kServoMinDeg;
  if (deg > kServoMaxDeg) return kServoMaxDeg;
  return deg;
}

// Minimal-footprint linear congruential generator (numerical-recipes
// constants), seeded once at boot. Only bound compliance matters; the host
// runtime draws its jitter from a different generator.
class Lcg {
 public:
  explicit Lcg(uint32_t seed) : state_(seed) {}

  uint32_t next() {
    state_ = state_ * 1664525u + 1013904223u;
    return state_;
  }

  // Uniform float in [lo, hi).
  float uniform(float lo, float hi) {
    return lo + (hi - lo) * (next() >> 8) / 16777216.0f;
  }

 private:
  uint32_t state_;
};

class GesturePlayer {
 public:
  explicit GesturePlayer(uint32_t seed) : rng_(seed) {
    for (int j = 0; j < gestures::kNumJoints; ++j) pose_[j] = kIdleDeg;
  }

  // Start the gesture for a validated sentiment character ('a'..'e'),
  // preempting any active playback from the current pose.
  void start(char sentiment, uint32_t now_ms) {
    const int index = sentiment - 'a';
    if (index < 0 || index >= gestures::kNumGestures) return;
    const gestures::Keyframe* frames = gestures::kTable[index];
    const int count = gestures::kKeyframeCounts[index];

    n_waypoints_ = 0;
    push_waypoint_(pose_, 0.0f);
    float t = 0.0f;
    for (int k = 0; k < count && n_waypoints_ < kMaxWaypoints - 1; ++k) {
      float angles[gestures::kNumJoints];
      for (int j = 0; j < gestures::kNumJoints; ++j) {
        const float delta = rng_.uniform(-kMaxJitterDeg, kMaxJitterDeg);
        angles[j] = clamp_deg(frames[k].angles[j] + delta);
      }
      const float scale = rng_.uniform(1.0f - kMaxTimeFrac, 1.0f + kMaxTimeFrac);
      t += frames[k].hold_ms * scale;
      push_waypoint_(angles, t);
    }
    t += gestures::kIdle.hold_ms;  // park at idle, unperturbed
    push_waypoint_(gestures::kIdle.angles, t);

    start_ms_ = now_ms;
    duration_ms_ = t;
    active_ = true;
  }

  // Advance playback; pose() then holds the servo targets for now_ms.
  void update(uint32_t now_ms) {
    if (!active_) return;
    const float t = static_cast<float>(now_ms - start_ms_);
    if (t >= duration_ms_) {
      for (int j = 0; j < gestures::kNumJoints; ++j) {
        pose_[j] = waypoints_[n_waypoints_ - 1].angles[j];
      }
      active_ = false;
      return;
    }
    int hi = 1;
    while (hi < n_waypoints_ - 1 && waypoints_[hi].t_ms < t) ++hi;
    const Waypoint& a = waypoints_[hi - 1];
    const Waypoint& b = waypoints_[hi];
    const float span = b.t_ms - a.t_ms;
    const float frac = span > 0.0f ? (t - a.t_ms) / span : 1.0f;
    for (int j = 0; j < gestures::kNumJoints; ++j) {
      pose_[j] = clamp_deg(a.angles[j] + (b.angles[j] - a.angles[j]) * frac);
    }
  }

  bool active() const { return active_; }
  const float* pose() const { return pose_; }
  float duration_ms() const { return duration_ms_; }

 private:
  struct Waypoint {
    float angles[gestures::kNumJoints];
    float t_ms;
  };

  void push_waypoint_(const float* angles, float t) {
    for (int j = 0; j < gestures::kNumJoints; ++j) {
      waypoints_[n_waypoints_].angles[j] = angles[j];
    }
    waypoints_[n_waypoints_].t_ms = t;
    ++n_waypoints_;
  }

  Lcg rng_;
  float pose_[gestures::kNumJoints];
  Waypoint waypoints_[kMaxWaypoints];
  int n_waypoints_ = 0;
  uint32_t start_ms_ = 0;
  float duration_ms_ = 0.0f;
  bool active_ = false;
};

}  // namespace gesture
