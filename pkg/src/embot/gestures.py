"""Sentiment-to-motion planning for the 7-joint chassis.

Each sentiment maps to an ordered keyframe list (a pose plus the time to move
into it). Planning applies bounded, seeded randomization so repeated gestures
do not look mechanical, then interpolation turns the plan into a fixed-rate
joint-angle timeline bounded to the servo range.
"""

from __future__ import annotations

import bisect
import enum
import json
import random
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from .dialog import SentimentLabel

SERVO_MIN_DEG = 0.0
SERVO_MAX_DEG = 180.0
IDLE_ANGLE_DEG = 90.0
DEFAULT_TICK_HZ = 50.0

# Sanity bounds on a single gesture's base duration.
MIN_GESTURE_MS = 500.0
MAX_GESTURE_MS = 10_000.0

DEFAULT_TABLE_RESOURCE = "gestures.json"


class GestureError(Exception):
    pass


class TableFileInvalid(GestureError):
    """A gesture table file failed schema or invariant validation."""


class JointId(enum.Enum):
    LEFT_FOOT = "left_foot"
    RIGHT_FOOT = "right_foot"
    LEFT_LEG = "left_leg"
    RIGHT_LEG = "right_leg"
    LEFT_ARM = "left_arm"
    RIGHT_ARM = "right_arm"
    NECK = "neck"


JOINTS: tuple[JointId, ...] = tuple(JointId)

Pose = dict[JointId, float]


def clamp_angle(deg: float) -> float:
    return min(SERVO_MAX_DEG, max(SERVO_MIN_DEG, deg))


def idle_pose() -> Pose:
    return {joint: IDLE_ANGLE_DEG for joint in JOINTS}


@dataclass(frozen=True)
class Keyframe:
    """A full 7-joint pose plus the window (ms) to move into it."""

    angles: Mapping[JointId, float]
    hold_ms: float

    def __post_init__(self) -> None:
        missing = [j.value for j in JOINTS if j not in self.angles]
        if missing:
            raise GestureError(f"keyframe missing joints: {missing}")
        for joint, angle in self.angles.items():
            if not SERVO_MIN_DEG <= angle <= SERVO_MAX_DEG:
                raise GestureError(
                    f"{joint.value} angle {angle} outside "
                    f"[{SERVO_MIN_DEG}, {SERVO_MAX_DEG}]"
                )
        if self.hold_ms <= 0:
            raise GestureError(f"hold_ms must be > 0, got {self.hold_ms}")


@dataclass(frozen=True)
class GestureTable:
    """Base choreography: one keyframe list per sentiment plus the idle pose."""

    entries: Mapping[SentimentLabel, tuple[Keyframe, ...]]
    idle: Keyframe

    def __post_init__(self) -> None:
        for label in SentimentLabel:
            frames = self.entries.get(label)
            if not frames:
                raise GestureError(f"table has no keyframes for {label.name}")
            duration = sum(kf.hold_ms for kf in frames)
            if not MIN_GESTURE_MS <= duration <= MAX_GESTURE_MS:
                raise GestureError(
                    f"{label.name} duration {duration:.0f} ms outside "
                    f"[{MIN_GESTURE_MS:.0f}, {MAX_GESTURE_MS:.0f}]"
                )


@dataclass(frozen=True)
class JitterConfig:
    """Bounded randomization: per-angle offset and per-hold time scale.

    Either axis can be zeroed independently; with both at zero the plan equals
    the base table for any seed.
    """

    max_deg: float = 5.0
    max_time_frac: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_deg < 0:
            raise GestureError("max_deg must be >= 0")
        if self.max_time_frac < 0:
            raise GestureError("max_time_frac must be >= 0")


@dataclass(frozen=True)
class GesturePlan:
    sentiment: SentimentLabel
    keyframes: tuple[Keyframe, ...]

    @property
    def duration_ms(self) -> float:
        return sum(kf.hold_ms for kf in self.keyframes)


@dataclass(frozen=True)
class TimelineSample:
    t_ms: float
    angles: Mapping[JointId, float]


def plan(
    sentiment: SentimentLabel,
    table: GestureTable,
    jitter: JitterConfig | None = None,
) -> GesturePlan:
    """Build a jittered motion plan for one sentiment.

    Every base angle is offset by a uniform draw in +/- max_deg (then clamped)
    and every hold is scaled by a uniform factor in 1 +/- max_time_frac. The
    idle pose is appended unperturbed so every gesture parks the chassis.
    Pure in (sentiment, table, jitter): a fixed seed replays exactly.
    """
    jitter = jitter or JitterConfig()
    rng = random.Random(jitter.seed)
    keyframes: list[Keyframe] = []
    for base in table.entries[sentiment]:
        angles = {}
        for joint in JOINTS:  # fixed draw order keeps seeds reproducible
            delta = rng.uniform(-jitter.max_deg, jitter.max_deg)
            angles[joint] = clamp_angle(base.angles[joint] + delta)
        scale = rng.uniform(1.0 - jitter.max_time_frac, 1.0 + jitter.max_time_frac)
        keyframes.append(Keyframe(angles=angles, hold_ms=base.hold_ms * scale))
    keyframes.append(table.idle)
    return GesturePlan(sentiment=sentiment, keyframes=tuple(keyframes))


def _waypoints(
    gesture_plan: GesturePlan, start_pose: Pose | None
) -> tuple[list[float], list[Pose]]:
    times = [0.0]
    poses = [dict(start_pose) if start_pose is not None else idle_pose()]
    t = 0.0
    for kf in gesture_plan.keyframes:
        t += kf.hold_ms
        times.append(t)
        poses.append({j: float(kf.angles[j]) for j in JOINTS})
    return times, poses


def pose_between(times: list[float], poses: list[Pose], t_ms: float) -> Pose:
    """Linearly interpolated pose at t_ms along a waypoint sequence."""
    if t_ms <= times[0]:
        return dict(poses[0])
    if t_ms >= times[-1]:
        return dict(poses[-1])
    hi = bisect.bisect_right(times, t_ms)
    lo = hi - 1
    span = times[hi] - times[lo]
    frac = (t_ms - times[lo]) / span if span > 0 else 1.0
    return {
        j: clamp_angle(poses[lo][j] + (poses[hi][j] - poses[lo][j]) * frac)
        for j in JOINTS
    }


def interpolate(
    gesture_plan: GesturePlan,
    tick_rate_hz: float = DEFAULT_TICK_HZ,
    start_pose: Pose | None = None,
) -> list[TimelineSample]:
    """Expand a plan into a fixed-rate joint-angle timeline.

    The timeline begins at the current pose (idle when not given), moves
    linearly between keyframes, and its last sample lands exactly on the final
    keyframe. All emitted angles are clamped to the servo range.
    """
    if tick_rate_hz <= 0:
        raise GestureError("tick_rate_hz must be > 0")
    times, poses = _waypoints(gesture_plan, start_pose)
    duration = times[-1]
    step_ms = 1000.0 / tick_rate_hz
    samples: list[TimelineSample] = []
    k = 0
    while k * step_ms < duration:
        t = k * step_ms
        samples.append(TimelineSample(t_ms=t, angles=pose_between(times, poses, t)))
        k += 1
    samples.append(
        TimelineSample(t_ms=duration, angles=pose_between(times, poses, duration))
    )
    return samples


def _parse_keyframe(obj: dict, where: str) -> Keyframe:
    if not isinstance(obj, dict) or "angles" not in obj or "hold_ms" not in obj:
        raise TableFileInvalid(f"{where}: keyframe needs 'angles' and 'hold_ms'")
    raw_angles = obj["angles"]
    if not isinstance(raw_angles, dict):
        raise TableFileInvalid(f"{where}: 'angles' must be a joint->degrees map")
    angles: Pose = {}
    for joint in JOINTS:
        if joint.value not in raw_angles:
            raise TableFileInvalid(f"{where}: missing joint '{joint.value}'")
        angles[joint] = float(raw_angles[joint.value])
    unknown = set(raw_angles) - {j.value for j in JOINTS}
    if unknown:
        raise TableFileInvalid(f"{where}: unknown joints {sorted(unknown)}")
    try:
        return Keyframe(angles=angles, hold_ms=float(obj["hold_ms"]))
    except (GestureError, TypeError, ValueError) as e:
        raise TableFileInvalid(f"{where}: {e}") from e


def parse_table(payload: dict) -> GestureTable:
    if not isinstance(payload, dict):
        raise TableFileInvalid("table file must contain a JSON object")
    if "idle" not in payload or "gestures" not in payload:
        raise TableFileInvalid("table file needs 'idle' and 'gestures' keys")
    idle = _parse_keyframe(payload["idle"], "idle")
    gestures = payload["gestures"]
    entries: dict[SentimentLabel, tuple[Keyframe, ...]] = {}
    for label in SentimentLabel:
        name = label.name.lower()
        if name not in gestures:
            raise TableFileInvalid(f"table file missing gesture '{name}'")
        frames = gestures[name]
        if not isinstance(frames, list) or not frames:
            raise TableFileInvalid(f"gesture '{name}' must be a non-empty list")
        entries[label] = tuple(
            _parse_keyframe(kf, f"{name}[{i}]") for i, kf in enumerate(frames)
        )
    try:
        return GestureTable(entries=entries, idle=idle)
    except GestureError as e:
        raise TableFileInvalid(str(e)) from e


def load_table(path: str) -> GestureTable:
    """Load and validate a gesture table file (see data/gestures.json)."""
    try:
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise TableFileInvalid(f"{path}: {e}") from e
    return parse_table(payload)


def default_table() -> GestureTable:
    """The table shipped with the package.

    Only the greeting (an arm wave) is anchored to the reference design; the
    rest of the choreography is a replaceable design constant living in the
    data file, not in code.
    """
    text = resources.files("embot.data").joinpath(DEFAULT_TABLE_RESOURCE).read_text()
    return parse_table(json.loads(text))
