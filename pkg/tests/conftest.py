"""Shared builders for the test suite: audio fixtures and scripted stacks."""

import numpy as np
import pytest

from embot.audio import FRAME_SAMPLES, SAMPLE_RATE
from embot.clients import (
    ClientBundle,
    ScriptedLlmClient,
    ScriptedSttClient,
    ToneTtsClient,
)
from embot.dialog import SentimentLabel
from embot.pipeline import format_agent_reply

SPEECH_AMPLITUDE = 3000  # RMS fraction ~0.065, comfortably above 0.02


def speech(ms: int, amplitude: int = SPEECH_AMPLITUDE,
           freq_hz: float = 440.0) -> np.ndarray:
    n = SAMPLE_RATE * ms // 1000
    t = np.arange(n) / SAMPLE_RATE
    return (amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.int16)


def silence(ms: int) -> np.ndarray:
    return np.zeros(SAMPLE_RATE * ms // 1000, dtype=np.int16)


def frames_of(samples: np.ndarray) -> list[np.ndarray]:
    n = len(samples) // FRAME_SAMPLES
    return [samples[i * FRAME_SAMPLES:(i + 1) * FRAME_SAMPLES] for i in range(n)]


def scripted_bundle(
    transcripts: list[str],
    replies: list[tuple[str, SentimentLabel]],
) -> ClientBundle:
    """Deterministic stub stack from (text, sentiment) reply pairs."""
    return ClientBundle(
        stt=ScriptedSttClient(list(transcripts)),
        llm=ScriptedLlmClient([format_agent_reply(t, s) for t, s in replies]),
        tts=ToneTtsClient(),
    )


@pytest.fixture
def stub_bundle() -> ClientBundle:
    return scripted_bundle(
        ["what is five across", "how about four down", "thanks goodbye"],
        [
            ("Hello! Five across is RIVER.", SentimentLabel.GREETING),
            ("Happy to help, four down is OTTER.", SentimentLabel.HAPPY),
            ("Goodbye, enjoy the puzzle!", SentimentLabel.DANCE),
        ],
    )
