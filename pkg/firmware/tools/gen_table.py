#!/usr/bin/env python3
"""Generate gestures_table.h from the host gesture table file.

Keeps the firmware's compiled-in choreography and the host runtime's data
file as one source of truth. Run from anywhere:

    python3 firmware/tools/gen_table.py \
        src/embot/data/gestures.json firmware/src/gestures_table.h
"""

import json
import sys

JOINTS = ["left_foot", "right_foot", "left_leg", "right_leg",
          "left_arm", "right_arm", "neck"]
GESTURES = ["greeting", "happy", "sad", "serious", "dance"]  # 'a'..'e'


def keyframe_line(kf: dict) -> str:
    angles = ", ".join(f"{float(kf['angles'][j]):.1f}f" for j in JOINTS)
    return f"    {{{{{angles}}}, {float(kf['hold_ms']):.1f}f}},"


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    src, dst = sys.argv[1], sys.argv[2]
    with open(src, encoding="utf-8") as f:
        table = json.load(f)

    lines = [
        "// Generated by tools/gen_table.py from the host gesture table.",
        "// Do not edit; regenerate instead.",
        "#pragma once",
        "",
        "namespace gestures {",
        "",
        "constexpr int kNumJoints = 7;",
        "constexpr int kNumGestures = 5;",
        "",
        "struct Keyframe {",
        "  float angles[kNumJoints];",
        "  float hold_ms;",
        "};",
        "",
    ]

    idle = table["idle"]
    idle_angles = ", ".join(f"{float(idle['angles'][j]):.1f}f" for j in JOINTS)
    lines.append(f"constexpr Keyframe kIdle = {{{{{idle_angles}}}, "
                 f"{float(idle['hold_ms']):.1f}f}};")
    lines.append("")

    counts = []
    for name in GESTURES:
        frames = table["gestures"][name]
        counts.append(len(frames))
        lines.append(f"constexpr Keyframe k_{name}[] = {{")
        lines.extend(keyframe_line(kf) for kf in frames)
        lines.append("};")
        lines.append("")

    lines.append("constexpr int kKeyframeCounts[kNumGestures] = {"
                 + ", ".join(str(c) for c in counts) + "};")
    lines.append("constexpr const Keyframe* kTable[kNumGestures] = {"
                 + ", ".join(f"k_{name}" for name in GESTURES) + "};")
    lines.append("")
    lines.append("}  // namespace gestures")
    lines.append("")

    with open(dst, "w", encoding="utf-8") as f:
        f.write("\n".join(lines))
    print(f"wrote {dst}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
