"""Host-to-controller wire protocol and the virtual motor controller.

A command frame is exactly five bytes::

    [0x7E sync][0x01 version][0x01 payload_len][sentiment char][checksum]

where checksum is the XOR of the version, length, and payload bytes. The
payload is the single sentiment character 'a'..'e'. The virtual device speaks
the same frames as the microcontroller firmware, executes gesture plans, and
streams joint telemetry, so the whole stack runs with no hardware attached.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from .dialog import SentimentLabel
from .gestures import (
    GestureTable,
    JitterConfig,
    JointId,
    JOINTS,
    Pose,
    SERVO_MAX_DEG,
    SERVO_MIN_DEG,
    _waypoints,
    default_table,
    idle_pose,
    plan,
    pose_between,
)

SYNC_BYTE = 0x7E
PROTOCOL_VERSION = 0x01
PAYLOAD_LEN = 0x01
FRAME_LEN = 5

DEFAULT_TELEMETRY_HZ = 20.0
DEFAULT_SERIAL_BAUD = 115_200

VECTOR_RESOURCE = "wire_conformance.txt"


class WireError(Exception):
    """Base class for frame decode failures; offset points at the bad byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class BadSync(WireError):
    """Sync byte missing or header field (version/length) not a v1 frame."""


class BadChecksum(WireError):
    pass


class UnknownSentiment(WireError):
    pass


class Truncated(WireError):
    pass


def frame_checksum(version: int, length: int, payload: int) -> int:
    return version ^ length ^ payload


def encode_command(sentiment: SentimentLabel) -> bytes:
    """Encode a sentiment into a five-byte command frame."""
    payload = sentiment.wire_byte
    return bytes([
        SYNC_BYTE,
        PROTOCOL_VERSION,
        PAYLOAD_LEN,
        payload,
        frame_checksum(PROTOCOL_VERSION, PAYLOAD_LEN, payload),
    ])


def decode_command(data: bytes) -> SentimentLabel:
    """Decode the command frame at the start of a buffer.

    Validation order: truncation, sync, header fields, checksum, payload
    range. Bytes past the first frame are ignored so stream parsers and the
    single-frame decoder classify identically.
    """
    if len(data) < FRAME_LEN:
        raise Truncated(f"need {FRAME_LEN} bytes, got {len(data)}", len(data))
    if data[0] != SYNC_BYTE:
        raise BadSync(f"expected sync 0x{SYNC_BYTE:02X}, got 0x{data[0]:02X}", 0)
    if data[1] != PROTOCOL_VERSION:
        raise BadSync(f"unsupported frame version 0x{data[1]:02X}", 1)
    if data[2] != PAYLOAD_LEN:
        raise BadSync(f"unsupported payload length 0x{data[2]:02X}", 2)
    expected = frame_checksum(data[1], data[2], data[3])
    if data[4] != expected:
        raise BadChecksum(
            f"checksum 0x{data[4]:02X}, expected 0x{expected:02X}", 4
        )
    try:
        return SentimentLabel.from_wire_char(chr(data[3]))
    except ValueError:
        raise UnknownSentiment(f"payload 0x{data[3]:02X} not in 'a'..'e'", 3) from None


ParseOutcome = "SentimentLabel | WireError"


class StreamParser:
    """Byte-at-a-time frame scanner that resynchronizes on the sync byte.

    feed() returns decoded labels and classified errors in arrival order;
    garbage runs between frames surface as one BadSync each, never silently.
    """

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list["SentimentLabel | WireError"]:
        self._buf.extend(data)
        out: list[SentimentLabel | WireError] = []
        while self._buf:
            if self._buf[0] != SYNC_BYTE:
                idx = self._buf.find(bytes([SYNC_BYTE]))
                out.append(BadSync(
                    f"skipping {len(self._buf) if idx < 0 else idx} "
                    "bytes hunting for sync", 0,
                ))
                if idx < 0:
                    self._buf.clear()
                    break
                del self._buf[:idx]
                continue
            if len(self._buf) < FRAME_LEN:
                break  # wait for the rest of the frame
            try:
                out.append(decode_command(bytes(self._buf[:FRAME_LEN])))
                del self._buf[:FRAME_LEN]
            except WireError as e:
                out.append(e)
                del self._buf[0]  # drop the sync byte, rescan the remainder
        return out

    def finish(self) -> list["SentimentLabel | WireError"]:
        """Flush end-of-stream; a pending partial frame becomes Truncated."""
        if not self._buf:
            return []
        pending = len(self._buf)
        self._buf.clear()
        return [Truncated(f"stream ended inside a frame ({pending} bytes)", pending)]


def classify_frame_bytes(data: bytes) -> "SentimentLabel | WireError":
    """Primary classification of one isolated frame, stream-parser style."""
    parser = StreamParser()
    outcomes = parser.feed(data) + parser.finish()
    return outcomes[0]


@dataclass(frozen=True)
class TelemetryFrame:
    """One joint-state sample streamed by the device."""

    t_ms: float
    angles: Mapping[JointId, float]
    active_gesture: SentimentLabel | None = None

    def __post_init__(self) -> None:
        for joint in JOINTS:
            angle = self.angles[joint]
            if not SERVO_MIN_DEG <= angle <= SERVO_MAX_DEG:
                raise ValueError(f"{joint.value} angle {angle} out of range")

    def as_dict(self) -> dict:
        return {
            "t_ms": self.t_ms,
            "angles": {j.value: self.angles[j] for j in JOINTS},
            "active_gesture": (
                self.active_gesture.name.lower() if self.active_gesture else None
            ),
        }


class VirtualDevice:
    """In-process stand-in for the motor controller.

    Commands preempt: a new frame starts its gesture from the current pose.
    step() is driven by a single external clock and emits telemetry on a
    fixed-rate grid. Safe for one command writer plus one stepping thread.
    """

    def __init__(
        self,
        table: GestureTable | None = None,
        jitter_max_deg: float = 5.0,
        jitter_time_frac: float = 0.1,
        seed: int = 0,
        telemetry_hz: float = DEFAULT_TELEMETRY_HZ,
    ):
        self._table = table or default_table()
        self._jitter_max_deg = jitter_max_deg
        self._jitter_time_frac = jitter_time_frac
        self._seed = seed
        self._emit_interval_ms = 1000.0 / telemetry_hz
        self._lock = threading.Lock()
        self._parser = StreamParser()
        self._pose: Pose = idle_pose()
        self._active: SentimentLabel | None = None
        self._times: list[float] = []
        self._poses: list[Pose] = []
        self._anchor_ms = 0.0
        self._end_ms = 0.0
        self._now_ms = 0.0
        self._next_emit_ms = 0.0
        self._started = False  # telemetry grid anchors at the first step
        self._commands_seen = 0
        self.received_frames: list[bytes] = []

    @property
    def pose(self) -> Pose:
        with self._lock:
            return dict(self._pose)

    @property
    def active_gesture(self) -> SentimentLabel | None:
        with self._lock:
            return self._active

    @property
    def active(self) -> bool:
        return self.active_gesture is not None

    def send(self, frame: bytes, now_ms: float | None = None) -> SentimentLabel:
        """Deliver one complete command frame; raises WireError when invalid."""
        label = decode_command(frame)
        with self._lock:
            self.received_frames.append(bytes(frame[:FRAME_LEN]))
            self._start_gesture(label, self._now_ms if now_ms is None else now_ms)
        return label

    def feed(self, data: bytes, now_ms: float | None = None):
        """Deliver a raw byte stream (serial-style); returns classifications."""
        with self._lock:
            outcomes = self._parser.feed(data)
            now = self._now_ms if now_ms is None else now_ms
            for outcome in outcomes:
                if isinstance(outcome, SentimentLabel):
                    self._start_gesture(outcome, now)
        return outcomes

    def _start_gesture(self, label: SentimentLabel, now_ms: float) -> None:
        # Per-command seed keeps replays deterministic while still varying
        # successive gestures, matching how jitter is meant to feel.
        jitter = JitterConfig(
            max_deg=self._jitter_max_deg,
            max_time_frac=self._jitter_time_frac,
            seed=self._seed + self._commands_seen,
        )
        self._commands_seen += 1
        start = self._pose_at_locked(now_ms)
        gesture_plan = plan(label, self._table, jitter)
        self._times, self._poses = _waypoints(gesture_plan, start)
        self._anchor_ms = now_ms
        self._end_ms = now_ms + self._times[-1]
        self._active = label

    def _pose_at_locked(self, t_ms: float) -> Pose:
        if not self._times:
            return dict(self._pose)
        return pose_between(self._times, self._poses, t_ms - self._anchor_ms)

    def _active_at_locked(self, t_ms: float) -> SentimentLabel | None:
        if self._active is not None and t_ms <= self._end_ms:
            return self._active
        return None

    def step(self, now_ms: float) -> list[TelemetryFrame]:
        """Advance playback to now_ms, emitting any due telemetry samples."""
        with self._lock:
            if not self._started:
                self._started = True
                self._now_ms = now_ms
                self._next_emit_ms = now_ms
            now_ms = max(now_ms, self._now_ms)
            frames: list[TelemetryFrame] = []
            while self._next_emit_ms <= now_ms:
                t = self._next_emit_ms
                frames.append(TelemetryFrame(
                    t_ms=t,
                    angles=self._pose_at_locked(t),
                    active_gesture=self._active_at_locked(t),
                ))
                self._next_emit_ms += self._emit_interval_ms
            self._pose = self._pose_at_locked(now_ms)
            if self._active is not None and now_ms >= self._end_ms:
                self._active = None
            self._now_ms = now_ms
            return frames


class SerialCommandLink:
    """Writes command frames to a serial port. Needs the optional pyserial."""

    def __init__(self, port: str, baud: int = DEFAULT_SERIAL_BAUD):
        try:
            import serial
        except ImportError as e:
            raise RuntimeError(
                "serial transport needs the 'pyserial' package "
                "(pip install embot[hardware])"
            ) from e
        self._port = serial.Serial(port, baudrate=baud, timeout=1)

    def send(self, frame: bytes, now_ms: float | None = None) -> None:
        self._port.write(frame)
        self._port.flush()

    def close(self) -> None:
        self._port.close()


_LABEL_NAMES = {label.name.lower(): label for label in SentimentLabel}
_ERROR_NAMES = {
    "BadSync": BadSync,
    "BadChecksum": BadChecksum,
    "UnknownSentiment": UnknownSentiment,
    "Truncated": Truncated,
}


@dataclass(frozen=True)
class ConformanceVector:
    """One line of the shared protocol vector file."""

    line_no: int
    data: bytes
    expected: str  # gesture name ('happy') or error class name ('BadSync')

    @property
    def expects_error(self) -> bool:
        return self.expected in _ERROR_NAMES


def classify_outcome(outcome: "SentimentLabel | WireError") -> str:
    if isinstance(outcome, SentimentLabel):
        return outcome.name.lower()
    return type(outcome).__name__


def parse_vector_line(line: str, line_no: int) -> ConformanceVector | None:
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"vector line {line_no}: expected '<hex> <outcome>'")
    hex_bytes, expected = parts
    if expected not in _LABEL_NAMES and expected not in _ERROR_NAMES:
        raise ValueError(f"vector line {line_no}: unknown outcome {expected!r}")
    return ConformanceVector(line_no=line_no, data=bytes.fromhex(hex_bytes),
                             expected=expected)


def load_vectors(path: str | None = None) -> list[ConformanceVector]:
    """Load the conformance vector file (the packaged one by default)."""
    if path is None:
        text = resources.files("embot.data").joinpath(VECTOR_RESOURCE).read_text()
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    vectors = []
    for i, line in enumerate(text.splitlines(), start=1):
        vector = parse_vector_line(line, i)
        if vector is not None:
            vectors.append(vector)
    return vectors


def decode_outcome(data: bytes) -> str:
    """Outcome name of the host decoder for one frame buffer."""
    try:
        return classify_outcome(decode_command(data))
    except WireError as e:
        return classify_outcome(e)
