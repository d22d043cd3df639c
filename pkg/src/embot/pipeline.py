"""One conversational turn, end to end.

run_turn() strings the pluggable clients together: transcribe the captured
utterance, complete against the full history, parse (and if necessary repair)
the structured reply, synthesize speech, then commit the exchange and dispatch
the sentiment to the device just before playback so gesture and speech
overlap. If any client fails, the history is left untouched.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .clients import ClientBundle
from .device import encode_command
from .dialog import (
    BrevityReport,
    ConversationHistory,
    DEFAULT_BREVITY_LIMIT,
    Role,
    SentimentLabel,
    Turn,
    enforce_brevity,
)

logger = logging.getLogger(__name__)

FALLBACK_SENTIMENT = SentimentLabel.SERIOUS  # calmest stance for broken replies

_ROLE_TO_MESSAGE = {
    Role.SYSTEM: "system",
    Role.USER: "user",
    Role.AGENT: "assistant",
}

_SENTIMENT_TOKEN_RE = re.compile(
    r'"Sentiment"\s*:\s*"?\s*([a-eA-E])\s*"?(?=[,}\s"]|$)'
)
_RESPONSE_TOKEN_RE = re.compile(r'"Response"\s*:\s*"((?:[^"\\]|\\.)*)"')
_CODE_FENCE_RE = re.compile(r"```[a-zA-Z]*\n?|```")


class PipelineError(Exception):
    """A named stage of the turn failed; the history was not modified."""

    stage = "pipeline"


class SttUnavailable(PipelineError):
    stage = "stt"


class LlmUnavailable(PipelineError):
    stage = "llm"


class TtsUnavailable(PipelineError):
    stage = "tts"


@dataclass(frozen=True)
class AgentReply:
    """Parsed model output. `repaired` marks anything past a strict parse."""

    raw: str
    text: str
    sentiment: SentimentLabel
    repaired: bool


@dataclass(frozen=True)
class TurnOutcome:
    user_turn: Turn
    agent_turn: Turn
    audio_out: np.ndarray
    dispatched_sentiment: SentimentLabel
    timings_ms: dict[str, float] = field(default_factory=dict)
    brevity: BrevityReport | None = None
    repaired: bool = False


def format_agent_reply(text: str, sentiment: SentimentLabel) -> str:
    """The well-formed reply shape the pre-prompt asks the model for."""
    return json.dumps({"Response": text, "Sentiment": sentiment.wire_char})


def build_messages(history: ConversationHistory) -> list[dict[str, str]]:
    """Map the history onto a chat message list, one message per turn.

    Agent messages carry the parsed reply text only; raw JSON replies are
    never echoed back to the model.
    """
    return [
        {"role": _ROLE_TO_MESSAGE[turn.role], "content": turn.text}
        for turn in history.turns
    ]


def _label_from_value(value) -> SentimentLabel | None:
    if value is None:
        return None
    token = str(value).strip().lower()
    if len(token) == 1:
        try:
            return SentimentLabel(token)
        except ValueError:
            return None
    return None


def _lookup_key(obj: dict, key: str):
    """Exact key first, then case-insensitive. Returns (value, was_exact)."""
    if key in obj:
        return obj[key], True
    for k, v in obj.items():
        if isinstance(k, str) and k.lower() == key.lower():
            return v, False
    return None, True


def _try_whole_json(raw: str) -> dict | None:
    try:
        obj = json.loads(raw.strip())
    except (json.JSONDecodeError, TypeError, ValueError, RecursionError):
        return None
    return obj if isinstance(obj, dict) else None


def _extract_object(raw: str) -> dict | None:
    """Parse the first balanced JSON object embedded anywhere in the string."""
    start = raw.find("{")
    if start < 0:
        return None
    try:
        obj, _ = json.JSONDecoder().raw_decode(raw[start:])
    except (json.JSONDecodeError, ValueError, RecursionError):
        return None
    return obj if isinstance(obj, dict) else None


def _strip_scaffolding(raw: str) -> str:
    """Best-effort plain text for fallback replies: drop fences and braces."""
    text = _CODE_FENCE_RE.sub(" ", raw)
    return text.strip().strip("{}").strip()


def parse_agent_reply(raw: str) -> AgentReply:
    """Parse a raw model reply into text plus a sentiment. Never raises.

    Strategy chain: strict whole-string JSON; first embedded JSON object;
    token scan for a quoted Sentiment character; finally plain-text fallback
    with the Serious sentiment. `repaired` is set whenever anything past the
    strict parse fired, including an out-of-range sentiment value.
    """
    if raw is None:
        raw = ""
    if not isinstance(raw, str):
        raw = str(raw)

    obj = _try_whole_json(raw)
    repaired = False
    if obj is None:
        obj = _extract_object(raw)
        if obj is not None:
            repaired = True

    if obj is not None:
        text_value, text_exact = _lookup_key(obj, "Response")
        sent_value, sent_exact = _lookup_key(obj, "Sentiment")
        text = "" if text_value is None else str(text_value)
        label = _label_from_value(sent_value)
        if label is None:
            label = FALLBACK_SENTIMENT
            repaired = True
        repaired = repaired or not (text_exact and sent_exact)
        return AgentReply(raw=raw, text=text, sentiment=label, repaired=repaired)

    match = _SENTIMENT_TOKEN_RE.search(raw)
    if match:
        label = SentimentLabel(match.group(1).lower())
        text_match = _RESPONSE_TOKEN_RE.search(raw)
        if text_match:
            try:
                text = json.loads(f'"{text_match.group(1)}"')
            except json.JSONDecodeError:
                text = text_match.group(1)
        else:
            text = _strip_scaffolding(raw)
        return AgentReply(raw=raw, text=text, sentiment=label, repaired=True)

    return AgentReply(
        raw=raw,
        text=_strip_scaffolding(raw),
        sentiment=FALLBACK_SENTIMENT,
        repaired=True,
    )


def run_turn(
    history: ConversationHistory,
    audio_in: np.ndarray,
    clients: ClientBundle,
    device_sender: Callable[[bytes], None],
    brevity_limit: int = DEFAULT_BREVITY_LIMIT,
    now_ms: Callable[[], int] | None = None,
) -> TurnOutcome:
    """Execute one turn against the given history.

    The caller's state machine is expected to be in the thinking state. The
    exchange is appended and the sentiment dispatched only after every client
    stage succeeded, so a failed turn leaves the history byte-identical.
    """
    stamp = now_ms or (lambda: 0)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    try:
        transcript = clients.stt.transcribe(audio_in)
    except Exception as e:
        raise SttUnavailable(f"speech-to-text failed: {e}") from e
    timings["stt"] = (time.perf_counter() - t0) * 1000
    user_ts = stamp()

    messages = build_messages(history)
    messages.append({"role": "user", "content": transcript})
    t0 = time.perf_counter()
    try:
        raw = clients.llm.complete(messages)
    except Exception as e:
        raise LlmUnavailable(f"completion failed: {e}") from e
    timings["llm"] = (time.perf_counter() - t0) * 1000

    reply = parse_agent_reply(raw)
    if reply.repaired:
        logger.warning("reply needed repair, sentiment=%s raw=%.120r",
                       reply.sentiment.name, raw)

    t0 = time.perf_counter()
    try:
        audio_out = clients.tts.synthesize(reply.text, clients.voice)
    except Exception as e:
        raise TtsUnavailable(f"speech synthesis failed: {e}") from e
    timings["tts"] = (time.perf_counter() - t0) * 1000

    history.append_exchange(
        transcript, reply.text, reply.sentiment,
        user_ts_ms=user_ts, agent_ts_ms=stamp(),
    )
    # Gesture command goes out before the caller starts playback, so the
    # motion overlaps the spoken reply instead of trailing it.
    device_sender(encode_command(reply.sentiment))

    brevity = enforce_brevity(reply.text, brevity_limit)
    if not brevity.within_limit:
        logger.warning("reply exceeded %d words (%d): %.80r",
                       brevity.limit, brevity.word_count, reply.text)

    return TurnOutcome(
        user_turn=history.turns[-2],
        agent_turn=history.turns[-1],
        audio_out=audio_out,
        dispatched_sentiment=reply.sentiment,
        timings_ms=timings,
        brevity=brevity,
        repaired=reply.repaired,
    )
