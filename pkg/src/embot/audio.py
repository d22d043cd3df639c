"""Audio capture, playback, and energy-based end-of-utterance detection.

All audio is 16 kHz mono signed 16-bit PCM, processed in fixed 20 ms frames
(320 samples). Capture stops once the speaker has been silent for the
configured hangover (1 s by default), which is what turns an open microphone
into discrete utterances.
"""

from __future__ import annotations

import abc
import enum
import io
import math
import wave
from dataclasses import dataclass

import numpy as np

SAMPLE_RATE = 16_000
FRAME_MS = 20
FRAME_SAMPLES = SAMPLE_RATE * FRAME_MS // 1000  # 320
FULL_SCALE = 32768.0
CAPTURE_CAP_S = 60.0


class AudioError(Exception):
    """Base class for audio-path errors."""


class MalformedFrame(AudioError):
    pass


class CaptureTimeout(AudioError):
    pass


class SourceClosed(AudioError):
    pass


class UnsupportedWav(AudioError):
    pass


class FrameLabel(enum.Enum):
    SPEECH = "speech"
    SILENCE = "silence"


@dataclass(frozen=True)
class EndpointerConfig:
    """Tunables for the RMS endpointer.

    silence_hangover_s is how long the speaker must stay quiet before the
    utterance is considered finished; energy_threshold is the RMS fraction of
    full scale at or above which a frame counts as speech.
    """

    silence_hangover_s: float = 1.0
    energy_threshold: float = 0.02
    min_utterance_s: float = 0.2

    def __post_init__(self) -> None:
        if self.silence_hangover_s <= 0:
            raise ValueError("silence_hangover_s must be > 0")
        if not 0 < self.energy_threshold < 1:
            raise ValueError("energy_threshold must be in (0, 1)")
        if self.min_utterance_s < 0:
            raise ValueError("min_utterance_s must be >= 0")

    @property
    def hangover_frames(self) -> int:
        return max(1, math.ceil(self.silence_hangover_s * 1000 / FRAME_MS))

    @property
    def min_utterance_frames(self) -> int:
        return math.ceil(self.min_utterance_s * 1000 / FRAME_MS)


def _check_frame(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.ndim != 1 or frame.shape[0] != FRAME_SAMPLES:
        raise MalformedFrame(
            f"expected {FRAME_SAMPLES} mono samples, got shape {frame.shape}"
        )
    if frame.dtype != np.int16:
        raise MalformedFrame(f"expected int16 samples, got {frame.dtype}")
    return frame


def rms_fraction(frame: np.ndarray) -> float:
    """RMS amplitude of a frame as a fraction of int16 full scale."""
    x = frame.astype(np.float64)
    return float(np.sqrt(np.mean(x * x)) / FULL_SCALE)


def classify_frame(frame: np.ndarray, config: EndpointerConfig) -> FrameLabel:
    """Label a frame as speech or silence; the threshold is inclusive."""
    frame = _check_frame(frame)
    if rms_fraction(frame) >= config.energy_threshold:
        return FrameLabel.SPEECH
    return FrameLabel.SILENCE


def split_frames(samples: np.ndarray) -> list[np.ndarray]:
    """Chop a sample buffer into whole frames; a trailing partial is dropped."""
    samples = np.asarray(samples, dtype=np.int16)
    n = len(samples) // FRAME_SAMPLES
    return [samples[i * FRAME_SAMPLES:(i + 1) * FRAME_SAMPLES] for i in range(n)]


class _EndpointTracker:
    """Incremental span detector shared by endpoint() and capture."""

    def __init__(self, config: EndpointerConfig):
        self.config = config
        self.in_utterance = False
        self.start = 0
        self.end = 0  # one past the last speech frame
        self.silence_run = 0

    def push(self, index: int, label: FrameLabel) -> tuple[int, int] | None:
        """Feed one frame label; returns a closed span when the hangover fires."""
        if label is FrameLabel.SPEECH:
            if not self.in_utterance:
                self.in_utterance = True
                self.start = index
            self.end = index + 1
            self.silence_run = 0
            return None
        if self.in_utterance:
            self.silence_run += 1
            if self.silence_run >= self.config.hangover_frames:
                return self._close()
        return None

    def flush(self) -> tuple[int, int] | None:
        """Close any open span at end of input."""
        if self.in_utterance:
            return self._close()
        return None

    def _close(self) -> tuple[int, int]:
        span = (self.start, self.end)
        self.in_utterance = False
        self.silence_run = 0
        return span


def endpoint(frames, config: EndpointerConfig | None = None) -> list[tuple[int, int]]:
    """Segment a frame sequence into utterance spans.

    A span covers the first through last speech frame of an utterance;
    trailing silence is excluded and internal pauses shorter than the hangover
    do not split. Spans shorter than min_utterance are discarded.
    """
    config = config or EndpointerConfig()
    tracker = _EndpointTracker(config)
    spans: list[tuple[int, int]] = []
    index = -1
    for index, frame in enumerate(frames):
        span = tracker.push(index, classify_frame(frame, config))
        if span is not None:
            spans.append(span)
    tail = tracker.flush()
    if tail is not None:
        spans.append(tail)
    return [s for s in spans if s[1] - s[0] >= config.min_utterance_frames]


class AudioSource(abc.ABC):
    """Pull-based frame supplier. read_frame returns None once the source closes."""

    @abc.abstractmethod
    def read_frame(self) -> np.ndarray | None: ...

    def close(self) -> None:
        pass


class BufferAudioSource(AudioSource):
    """Serves frames from an in-memory sample buffer, then reports closed."""

    def __init__(self, samples: np.ndarray):
        self._frames = split_frames(samples)
        self._next = 0

    def read_frame(self) -> np.ndarray | None:
        if self._next >= len(self._frames):
            return None
        frame = self._frames[self._next]
        self._next += 1
        return frame


class FileAudioSource(BufferAudioSource):
    """WAV-backed source for fixtures and canned captures."""

    def __init__(self, path: str):
        super().__init__(read_wav(path))


class DeviceAudioSource(AudioSource):
    """Microphone-backed source. Requires the optional sounddevice package."""

    def __init__(self, device: str | int | None = None):
        try:
            import sounddevice
        except ImportError as e:
            raise AudioError(
                "microphone capture needs the 'sounddevice' package "
                "(pip install embot[hardware])"
            ) from e
        self._stream = sounddevice.InputStream(
            samplerate=SAMPLE_RATE, channels=1, dtype="int16",
            blocksize=FRAME_SAMPLES, device=device,
        )
        self._stream.start()

    def read_frame(self) -> np.ndarray | None:
        data, _ = self._stream.read(FRAME_SAMPLES)
        return data.reshape(-1).astype(np.int16)

    def close(self) -> None:
        self._stream.stop()
        self._stream.close()


def capture_until_silence(
    source: AudioSource,
    config: EndpointerConfig | None = None,
) -> np.ndarray:
    """Record from a source until the first endpointed utterance completes.

    Returns the utterance audio with trailing silence removed. Raises
    SourceClosed if the source ends before an utterance is endpointed and
    CaptureTimeout once the 60 s safety cap is reached.
    """
    config = config or EndpointerConfig()
    tracker = _EndpointTracker(config)
    frames: list[np.ndarray] = []
    cap_frames = int(CAPTURE_CAP_S * 1000 / FRAME_MS)
    while True:
        if len(frames) >= cap_frames:
            raise CaptureTimeout(f"no endpoint within {CAPTURE_CAP_S:.0f} s")
        frame = source.read_frame()
        if frame is None:
            raise SourceClosed(
                "audio source closed before an utterance was endpointed"
            )
        frames.append(_check_frame(frame))
        span = tracker.push(len(frames) - 1, classify_frame(frame, config))
        if span is None:
            continue
        start, end = span
        if end - start < config.min_utterance_frames:
            continue  # too short to be an utterance; keep listening
        return np.concatenate(frames[start:end])


class AudioSink(abc.ABC):
    """Playback target. play() blocks for the duration of the segment."""

    @abc.abstractmethod
    def play(self, segment: np.ndarray) -> None: ...


class NullAudioSink(AudioSink):
    """Discards audio immediately, recording what would have been played."""

    def __init__(self):
        self.played: list[np.ndarray] = []

    def play(self, segment: np.ndarray) -> None:
        self.played.append(np.asarray(segment, dtype=np.int16))


class WavFileSink(AudioSink):
    """Writes each played segment to numbered WAV files under a directory."""

    def __init__(self, directory: str):
        import os

        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self._count = 0

    def play(self, segment: np.ndarray) -> None:
        import os

        path = os.path.join(self.directory, f"reply_{self._count:03d}.wav")
        write_wav(path, segment)
        self._count += 1


class DeviceAudioSink(AudioSink):
    """Speaker-backed sink. Requires the optional sounddevice package."""

    def __init__(self, device: str | int | None = None):
        try:
            import sounddevice
        except ImportError as e:
            raise AudioError(
                "speaker playback needs the 'sounddevice' package "
                "(pip install embot[hardware])"
            ) from e
        self._sd = sounddevice
        self._device = device

    def play(self, segment: np.ndarray) -> None:
        self._sd.play(segment, samplerate=SAMPLE_RATE, device=self._device,
                      blocking=True)


def read_wav(path: str) -> np.ndarray:
    """Load a 16 kHz mono PCM16 WAV file into an int16 sample array."""
    with wave.open(path, "rb") as w:
        if w.getframerate() != SAMPLE_RATE:
            raise UnsupportedWav(f"{path}: expected {SAMPLE_RATE} Hz, "
                                 f"got {w.getframerate()}")
        if w.getnchannels() != 1:
            raise UnsupportedWav(f"{path}: expected mono audio")
        if w.getsampwidth() != 2:
            raise UnsupportedWav(f"{path}: expected 16-bit samples")
        raw = w.readframes(w.getnframes())
    return np.frombuffer(raw, dtype=np.int16)


def write_wav(path: str, samples: np.ndarray) -> None:
    samples = np.asarray(samples, dtype=np.int16)
    with wave.open(path, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(SAMPLE_RATE)
        w.writeframes(samples.tobytes())


def wav_bytes(samples: np.ndarray) -> bytes:
    """Serialize samples to an in-memory WAV blob (for HTTP adapters)."""
    buf = io.BytesIO()
    samples = np.asarray(samples, dtype=np.int16)
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(SAMPLE_RATE)
        w.writeframes(samples.tobytes())
    return buf.getvalue()


def synthetic_utterance(
    speech_ms: int = 800,
    trailing_silence_ms: int = 1100,
    amplitude: int = 3000,
    freq_hz: float = 440.0,
) -> np.ndarray:
    """Build a deterministic speech-then-silence buffer for stubs and tests."""
    n_speech = SAMPLE_RATE * speech_ms // 1000
    t = np.arange(n_speech) / SAMPLE_RATE
    speech = (amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.int16)
    silence = np.zeros(SAMPLE_RATE * trailing_silence_ms // 1000, dtype=np.int16)
    return np.concatenate([speech, silence])
