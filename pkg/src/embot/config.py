"""Runtime configuration and wiring.

Config comes from an optional JSON file whose keys match the ServiceConfig
fields, with EMBOT_<FIELD> environment variables overriding individual values.
Stub mode needs no credentials; live adapters read endpoint URLs and API keys
from their own environment variables at build time.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from importlib import resources

from .audio import (
    AudioSink,
    AudioSource,
    BufferAudioSource,
    DeviceAudioSink,
    DeviceAudioSource,
    EndpointerConfig,
    FileAudioSource,
    NullAudioSink,
    WavFileSink,
    synthetic_utterance,
)
from .clients import (
    ClientBundle,
    EspeakTtsClient,
    HttpLlmClient,
    HttpSttClient,
    ScriptedLlmClient,
    ScriptedSttClient,
    ToneTtsClient,
    VoiceProfile,
)
from .device import DEFAULT_SERIAL_BAUD, SerialCommandLink, VirtualDevice
from .gestures import GestureTable, default_table, load_table

ENV_PREFIX = "EMBOT_"

STUB_TRANSCRIPTS_RESOURCE = "stub_transcripts.txt"
STUB_REPLIES_RESOURCE = "stub_replies.txt"


class ConfigError(Exception):
    pass


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8420

    # Adapter selection: "stub" or "live" per stage.
    stt: str = "stub"
    llm: str = "stub"
    tts: str = "stub"
    stt_script: str = ""  # stub transcript file; packaged default when empty
    llm_script: str = ""  # stub reply file; packaged default when empty
    llm_model: str = ""  # live-mode model identifier, passed through verbatim
    tts_engine: str = "espeak"  # live tts: "espeak" only for now

    voice_name: str = "robot"
    voice_rate_wpm: int = 140
    voice_pitch: int = 40

    # Audio I/O: input "synthetic", "device", or a WAV fixture path;
    # output "null", "device", or a directory for WAV dumps.
    audio_input: str = "synthetic"
    audio_output: str = "null"
    silence_hangover_s: float = 1.0
    energy_threshold: float = 0.02
    min_utterance_s: float = 0.2

    gesture_table: str = ""  # path; packaged default when empty
    jitter_max_deg: float = 5.0
    jitter_time_frac: float = 0.1
    seed: int = 0

    device: str = "virtual"  # or "serial"
    serial_port: str = "/dev/ttyUSB0"
    serial_baud: int = DEFAULT_SERIAL_BAUD
    telemetry_hz: float = 20.0

    log_dir: str = "logs"
    # realtime=False runs sessions on a virtual clock (instant gestures and
    # playback) - the mode the deterministic test suite uses.
    realtime: bool = True

    def validate(self) -> None:
        for name in ("stt", "llm", "tts"):
            value = getattr(self, name)
            if value not in ("stub", "live"):
                raise ConfigError(f"{name} must be 'stub' or 'live', got {value!r}")
        if self.device not in ("virtual", "serial"):
            raise ConfigError(f"device must be 'virtual' or 'serial', got "
                              f"{self.device!r}")
        if self.tts_engine not in ("espeak",):
            raise ConfigError(f"unknown tts_engine {self.tts_engine!r}")
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port {self.port} out of range")
        try:
            self.endpointer()
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.jitter_max_deg < 0 or self.jitter_time_frac < 0:
            raise ConfigError("jitter bounds must be >= 0")
        if self.telemetry_hz <= 0:
            raise ConfigError("telemetry_hz must be > 0")

    def endpointer(self) -> EndpointerConfig:
        return EndpointerConfig(
            silence_hangover_s=self.silence_hangover_s,
            energy_threshold=self.energy_threshold,
            min_utterance_s=self.min_utterance_s,
        )

    def voice(self) -> VoiceProfile:
        return VoiceProfile(name=self.voice_name, rate_wpm=self.voice_rate_wpm,
                            pitch=self.voice_pitch)


def _coerce(field: dataclasses.Field, raw: str):
    if field.type in ("bool", bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if field.type in ("int", int):
        return int(raw)
    if field.type in ("float", float):
        return float(raw)
    return raw


def load_config(
    path: str | None = None,
    stub_all: bool = False,
    env: dict | None = None,
) -> ServiceConfig:
    """Assemble a validated config from file, environment, and flags."""
    env = os.environ if env is None else env
    values: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as f:
                payload = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(payload, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        known = {f.name for f in dataclasses.fields(ServiceConfig)}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        values.update(payload)

    config = ServiceConfig(**values)
    for field in dataclasses.fields(ServiceConfig):
        raw = env.get(ENV_PREFIX + field.name.upper())
        if raw is not None:
            try:
                setattr(config, field.name, _coerce(field, raw))
            except ValueError as e:
                raise ConfigError(
                    f"bad value for {ENV_PREFIX + field.name.upper()}: {e}"
                ) from e

    if stub_all:
        config.stt = config.llm = config.tts = "stub"
        config.device = "virtual"
    config.validate()
    return config


def _packaged_lines(resource: str) -> list[str]:
    text = resources.files("embot.data").joinpath(resource).read_text()
    return [line for line in text.splitlines() if line.strip()]


def build_clients(config: ServiceConfig) -> ClientBundle:
    if config.stt == "stub":
        if config.stt_script:
            stt = ScriptedSttClient.from_file(config.stt_script, cycle=True)
        else:
            stt = ScriptedSttClient(_packaged_lines(STUB_TRANSCRIPTS_RESOURCE),
                                    cycle=True)
    else:
        stt = HttpSttClient()

    if config.llm == "stub":
        if config.llm_script:
            llm = ScriptedLlmClient.from_file(config.llm_script, cycle=True)
        else:
            llm = ScriptedLlmClient(_packaged_lines(STUB_REPLIES_RESOURCE),
                                    cycle=True)
    else:
        llm = HttpLlmClient(model=config.llm_model)

    if config.tts == "stub":
        tts = ToneTtsClient()
    else:
        tts = EspeakTtsClient()

    return ClientBundle(stt=stt, llm=llm, tts=tts, voice=config.voice())


def build_table(config: ServiceConfig) -> GestureTable:
    if config.gesture_table:
        return load_table(config.gesture_table)
    return default_table()


def build_device(config: ServiceConfig, table: GestureTable | None = None):
    if config.device == "serial":
        return SerialCommandLink(config.serial_port, baud=config.serial_baud)
    return VirtualDevice(
        table=table or build_table(config),
        jitter_max_deg=config.jitter_max_deg,
        jitter_time_frac=config.jitter_time_frac,
        seed=config.seed,
        telemetry_hz=config.telemetry_hz,
    )


def build_source_factory(config: ServiceConfig):
    if config.audio_input == "synthetic":
        return lambda: BufferAudioSource(synthetic_utterance())
    if config.audio_input == "device":
        return lambda: DeviceAudioSource()
    path = config.audio_input

    def factory() -> AudioSource:
        return FileAudioSource(path)

    return factory


def build_sink(config: ServiceConfig) -> AudioSink:
    if config.audio_output == "null":
        return NullAudioSink()
    if config.audio_output == "device":
        return DeviceAudioSink()
    return WavFileSink(config.audio_output)
