"""Pluggable speech-to-text, completion, and text-to-speech clients.

The scripted stubs are deterministic and credential-free; every test runs
against them. Live adapters are deliberately thin shells around hosted
endpoints (or a local espeak binary) selected by configuration, with
credentials taken from environment variables.
"""

from __future__ import annotations

import abc
import json
import os
import shutil
import subprocess
import wave
from dataclasses import dataclass, field

import numpy as np

from .audio import SAMPLE_RATE, wav_bytes

ENV_LLM_URL = "EMBOT_LLM_URL"
ENV_LLM_KEY = "EMBOT_LLM_API_KEY"
ENV_STT_URL = "EMBOT_STT_URL"
ENV_STT_KEY = "EMBOT_STT_API_KEY"
ENV_TTS_URL = "EMBOT_TTS_URL"
ENV_TTS_KEY = "EMBOT_TTS_API_KEY"


class ClientError(Exception):
    """Raised by client adapters; the pipeline maps it to a stage error."""


class ScriptExhausted(ClientError):
    """A scripted stub ran out of lines."""


@dataclass(frozen=True)
class VoiceProfile:
    """Speech-output voice. The default is intentionally flat and robotic."""

    name: str = "robot"
    rate_wpm: int = 140
    pitch: int = 40


class SttClient(abc.ABC):
    @abc.abstractmethod
    def transcribe(self, segment: np.ndarray) -> str:
        """Turn a 16 kHz mono PCM16 segment into text."""


class LlmClient(abc.ABC):
    @abc.abstractmethod
    def complete(self, messages: list[dict[str, str]]) -> str:
        """Return the raw model output for an ordered chat message list."""


class TtsClient(abc.ABC):
    @abc.abstractmethod
    def synthesize(self, text: str, profile: VoiceProfile) -> np.ndarray:
        """Render text into a 16 kHz mono PCM16 segment."""


@dataclass
class ClientBundle:
    stt: SttClient
    llm: LlmClient
    tts: TtsClient
    voice: VoiceProfile = field(default_factory=VoiceProfile)


class _Script:
    """Fixed line sequence shared by the scripted stubs."""

    def __init__(self, lines: list[str], cycle: bool = False):
        if not lines:
            raise ValueError("script needs at least one line")
        self._lines = list(lines)
        self._cycle = cycle
        self._next = 0

    @classmethod
    def from_file(cls, path: str, cycle: bool = False) -> "_Script":
        with open(path, encoding="utf-8") as f:
            lines = [ln.rstrip("\n") for ln in f if ln.strip()]
        return cls(lines, cycle=cycle)

    def next(self) -> str:
        if self._next >= len(self._lines):
            if not self._cycle:
                raise ScriptExhausted(
                    f"script exhausted after {len(self._lines)} lines"
                )
            self._next = 0
        line = self._lines[self._next]
        self._next += 1
        return line


class ScriptedSttClient(SttClient):
    """Returns scripted transcripts regardless of the audio content."""

    def __init__(self, lines: list[str], cycle: bool = False):
        self._script = _Script(lines, cycle=cycle)

    @classmethod
    def from_file(cls, path: str, cycle: bool = False) -> "ScriptedSttClient":
        client = cls.__new__(cls)
        client._script = _Script.from_file(path, cycle=cycle)
        return client

    def transcribe(self, segment: np.ndarray) -> str:
        return self._script.next()


class ScriptedLlmClient(LlmClient):
    """Returns scripted raw replies, one line per completion call."""

    def __init__(self, lines: list[str], cycle: bool = False):
        self._script = _Script(lines, cycle=cycle)
        self.calls: list[list[dict[str, str]]] = []

    @classmethod
    def from_file(cls, path: str, cycle: bool = False) -> "ScriptedLlmClient":
        client = cls.__new__(cls)
        client._script = _Script.from_file(path, cycle=cycle)
        client.calls = []
        return client

    def complete(self, messages: list[dict[str, str]]) -> str:
        self.calls.append([dict(m) for m in messages])
        return self._script.next()


class ToneTtsClient(TtsClient):
    """Deterministic offline TTS stand-in: a flat tone scaled to word count."""

    def __init__(self, base_ms: int = 200, per_word_ms: int = 150,
                 amplitude: int = 6000, freq_hz: float = 220.0):
        self.base_ms = base_ms
        self.per_word_ms = per_word_ms
        self.amplitude = amplitude
        self.freq_hz = freq_hz

    def synthesize(self, text: str, profile: VoiceProfile) -> np.ndarray:
        duration_ms = self.base_ms + self.per_word_ms * len(text.split())
        n = SAMPLE_RATE * duration_ms // 1000
        t = np.arange(n) / SAMPLE_RATE
        return (self.amplitude * np.sin(2 * np.pi * self.freq_hz * t)).astype(np.int16)


def _require_env(name: str) -> str:
    value = os.environ.get(name, "")
    if not value:
        raise ClientError(f"live adapter needs the {name} environment variable")
    return value


class HttpSttClient(SttClient):
    """POSTs WAV audio to a hosted transcription endpoint."""

    def __init__(self, url: str | None = None, timeout_s: float = 30.0):
        self.url = url or _require_env(ENV_STT_URL)
        self.api_key = os.environ.get(ENV_STT_KEY, "")
        self.timeout_s = timeout_s

    def transcribe(self, segment: np.ndarray) -> str:
        import requests

        headers = {"Content-Type": "audio/wav"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(self.url, data=wav_bytes(segment),
                                 headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            return str(resp.json()["text"])
        except Exception as e:
            raise ClientError(f"transcription request failed: {e}") from e


class HttpLlmClient(LlmClient):
    """Chat-completions adapter for any OpenAI-compatible endpoint."""

    def __init__(self, url: str | None = None, model: str = "",
                 timeout_s: float = 60.0):
        self.url = url or _require_env(ENV_LLM_URL)
        self.api_key = os.environ.get(ENV_LLM_KEY, "")
        self.model = model
        self.timeout_s = timeout_s

    def complete(self, messages: list[dict[str, str]]) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body: dict = {"messages": messages}
        if self.model:
            body["model"] = self.model
        try:
            resp = requests.post(self.url, data=json.dumps(body),
                                 headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            payload = resp.json()
            return str(payload["choices"][0]["message"]["content"])
        except Exception as e:
            raise ClientError(f"completion request failed: {e}") from e


class EspeakTtsClient(TtsClient):
    """Local synthesis via the espeak / espeak-ng binary."""

    def __init__(self, binary: str | None = None):
        self.binary = binary or shutil.which("espeak-ng") or shutil.which("espeak")
        if not self.binary:
            raise ClientError("espeak binary not found on PATH")

    def synthesize(self, text: str, profile: VoiceProfile) -> np.ndarray:
        cmd = [
            self.binary, "--stdout",
            "-s", str(profile.rate_wpm),
            "-p", str(profile.pitch),
            text,
        ]
        try:
            out = subprocess.run(cmd, capture_output=True, check=True).stdout
        except (OSError, subprocess.CalledProcessError) as e:
            raise ClientError(f"espeak failed: {e}") from e
        return _wav_blob_to_segment(out)


def _wav_blob_to_segment(blob: bytes) -> np.ndarray:
    """Decode a WAV blob and resample to the pipeline rate if needed."""
    import io

    with wave.open(io.BytesIO(blob), "rb") as w:
        rate = w.getframerate()
        channels = w.getnchannels()
        raw = w.readframes(w.getnframes())
    samples = np.frombuffer(raw, dtype=np.int16)
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1).astype(np.int16)
    if rate != SAMPLE_RATE:
        n_out = int(len(samples) * SAMPLE_RATE / rate)
        x_out = np.linspace(0, len(samples) - 1, n_out)
        samples = np.interp(x_out, np.arange(len(samples)),
                            samples.astype(np.float64)).astype(np.int16)
    return samples
