// Generated by tools/gen_table.py from the host gesture table.
// Do not edit; regenerate instead.
#pragma once

namespace gestures {

constexpr int kNumJoints = 7;
constexpr int kNumGestures = 5;

struct Keyframe {
  float angles[kNumJoints];
  float hold_ms;
};

constexpr Keyframe kIdle = {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 90.0f}, 400.0f};

constexpr Keyframe k_greeting[] = {
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 165.0f, 90.0f}, 350.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 115.0f, 90.0f}, 300.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 165.0f, 90.0f}, 300.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 115.0f, 90.0f}, 300.0f},
};

constexpr Keyframe k_happy[] = {
    {{90.0f, 90.0f, 80.0f, 100.0f, 150.0f, 150.0f, 90.0f}, 300.0f},
    {{90.0f, 90.0f, 100.0f, 80.0f, 160.0f, 160.0f, 90.0f}, 300.0f},
    {{90.0f, 90.0f, 80.0f, 100.0f, 150.0f, 150.0f, 90.0f}, 300.0f},
    {{90.0f, 90.0f, 100.0f, 80.0f, 160.0f, 160.0f, 90.0f}, 300.0f},
};

constexpr Keyframe k_sad[] = {
    {{90.0f, 90.0f, 90.0f, 90.0f, 50.0f, 50.0f, 70.0f}, 900.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 40.0f, 40.0f, 60.0f}, 900.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 45.0f, 45.0f, 65.0f}, 700.0f},
};

constexpr Keyframe k_serious[] = {
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 70.0f}, 700.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 110.0f}, 1200.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 90.0f, 90.0f}, 700.0f},
};

constexpr Keyframe k_dance[] = {
    {{80.0f, 100.0f, 70.0f, 110.0f, 140.0f, 40.0f, 80.0f}, 350.0f},
    {{100.0f, 80.0f, 110.0f, 70.0f, 40.0f, 140.0f, 100.0f}, 350.0f},
    {{80.0f, 100.0f, 70.0f, 110.0f, 140.0f, 40.0f, 80.0f}, 350.0f},
    {{100.0f, 80.0f, 110.0f, 70.0f, 40.0f, 140.0f, 100.0f}, 350.0f},
    {{90.0f, 90.0f, 90.0f, 90.0f, 120.0f, 60.0f, 90.0f}, 300.0f},
};

constexpr int kKeyframeCounts[kNumGestures] = {4, 4, 3, 3, 5};
constexpr const Keyframe* kTable[kNumGestures] = {k_greeting, k_happy, k_sad, k_serious, k_dance};

}  // namespace gestures
