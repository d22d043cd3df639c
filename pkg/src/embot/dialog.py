"""Conversation state: session state machine, history, and reply-length checks.

Everything here is plain data plus pure transition logic; audio, LLM access,
and device traffic live in their own modules and only consume these types.
"""

from __future__ import annotations

import enum
import logging
import uuid
from dataclasses import dataclass

logger = logging.getLogger(__name__)

# Canonical system prompt. This exact text seeds every new conversation and is
# the contract that makes replies arrive as {"Response": ..., "Sentiment": ...}
# with a sentiment character the gesture engine understands.
DEFAULT_PREPROMPT = (
    "Your name is Botson. You are the brains of a helpful assistant embodied "
    "into a robot. We are using speech-to-text, so there may be some errors. "
    "Do your best to mitigate, or ask for clarification. Keep your responses "
    "within 30 words. When you have more to say, share it over multiple "
    "responses in a conversational style. The response should include one "
    "text response. Each response must end with a single character that is "
    "most appropriate from this list: a (greeting), b (happy), c (sad), "
    "d (serious), e (dance). When responding, use the following JSON format, "
    "where x is the response, and y is the sentiment from the provided list: "
    '{ "Response": "x", "Sentiment": "y"}'
)

DEFAULT_BREVITY_LIMIT = 30

# Cap on completed exchanges per session (a plain guard against runaway
# sessions; conversations are expected to stay far below this at desk scale).
DEFAULT_MAX_EXCHANGES = 100


class DialogError(Exception):
    """Base class for dialog-state errors."""


class EmptyPreprompt(DialogError):
    """A session cannot be created without a system prompt."""


class InvalidTransition(DialogError):
    """Raised for any (state, event) pair not in the transition table."""

    def __init__(self, state: "SessionState", event: "SessionEvent"):
        super().__init__(f"no transition from {state.value} on {event.value}")
        self.state = state
        self.event = event


class HistoryLimitExceeded(DialogError):
    """The per-session exchange cap was hit."""


class SentimentLabel(enum.Enum):
    """The five reply sentiments; values are the single-byte wire characters."""

    GREETING = "a"
    HAPPY = "b"
    SAD = "c"
    SERIOUS = "d"
    DANCE = "e"

    @property
    def wire_char(self) -> str:
        return self.value

    @property
    def wire_byte(self) -> int:
        return ord(self.value)

    @classmethod
    def from_wire_char(cls, char: str) -> "SentimentLabel":
        try:
            return cls(char)
        except ValueError:
            raise ValueError(f"unknown sentiment character {char!r}") from None


class Role(enum.Enum):
    SYSTEM = "system"
    USER = "user"
    AGENT = "agent"


@dataclass(frozen=True, slots=True)
class Turn:
    """One utterance in a conversation. Immutable once created."""

    role: Role
    text: str
    sentiment: SentimentLabel | None = None
    timestamp_ms: int = 0

    def __post_init__(self) -> None:
        if (self.sentiment is not None) != (self.role is Role.AGENT):
            raise DialogError(
                f"sentiment must be present exactly on agent turns, got "
                f"role={self.role.value} sentiment={self.sentiment}"
            )


class SessionState(enum.Enum):
    IDLE = "idle"
    LISTENING = "listening"
    THINKING = "thinking"
    SPEAKING = "speaking"


class SessionEvent(enum.Enum):
    BUTTON_PRESSED = "button_pressed"
    SILENCE_DETECTED = "silence_detected"
    REPLY_READY = "reply_ready"
    PLAYBACK_DONE = "playback_done"
    ABORT = "abort"


_TRANSITIONS: dict[tuple[SessionState, SessionEvent], SessionState] = {
    (SessionState.IDLE, SessionEvent.BUTTON_PRESSED): SessionState.LISTENING,
    (SessionState.LISTENING, SessionEvent.SILENCE_DETECTED): SessionState.THINKING,
    (SessionState.THINKING, SessionEvent.REPLY_READY): SessionState.SPEAKING,
    (SessionState.SPEAKING, SessionEvent.PLAYBACK_DONE): SessionState.IDLE,
}


def transition(state: SessionState, event: SessionEvent) -> SessionState:
    """Advance the push-to-talk state machine.

    Abort returns to idle from any state; every other (state, event) pair must
    be in the table or InvalidTransition is raised.
    """
    if event is SessionEvent.ABORT:
        return SessionState.IDLE
    try:
        return _TRANSITIONS[(state, event)]
    except KeyError:
        raise InvalidTransition(state, event) from None


@dataclass(frozen=True, slots=True)
class BrevityReport:
    word_count: int
    within_limit: bool
    limit: int = DEFAULT_BREVITY_LIMIT


def enforce_brevity(text: str, limit: int = DEFAULT_BREVITY_LIMIT) -> BrevityReport:
    """Count whitespace-delimited words against the reply budget.

    Report-only: the text is never truncated, since cutting a reply mid-sentence
    would corrupt the spoken output. Violations are surfaced for logging/UI.
    """
    count = len(text.split())
    return BrevityReport(word_count=count, within_limit=count <= limit, limit=limit)


class ConversationHistory:
    """Ordered turn log for one session.

    turns[0] is always the system pre-prompt; user and agent turns strictly
    alternate after it, so after n exchanges the length is exactly 1 + 2n.
    Turns are frozen; the only mutation is appending a completed exchange.
    """

    def __init__(
        self,
        preprompt: str,
        session_id: str | None = None,
        max_exchanges: int = DEFAULT_MAX_EXCHANGES,
    ):
        if not preprompt or not preprompt.strip():
            raise EmptyPreprompt("preprompt must be a non-empty string")
        self.session_id = session_id if session_id is not None else uuid.uuid4().hex
        self.max_exchanges = max_exchanges
        self._turns: list[Turn] = [Turn(role=Role.SYSTEM, text=preprompt)]

    @property
    def turns(self) -> tuple[Turn, ...]:
        return tuple(self._turns)

    @property
    def preprompt(self) -> str:
        return self._turns[0].text

    @property
    def exchange_count(self) -> int:
        return (len(self._turns) - 1) // 2

    def __len__(self) -> int:
        return len(self._turns)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConversationHistory):
            return NotImplemented
        return self.session_id == other.session_id and self._turns == other._turns

    def __repr__(self) -> str:
        return (
            f"ConversationHistory(session_id={self.session_id!r}, "
            f"turns={len(self._turns)})"
        )

    def append_exchange(
        self,
        user_text: str,
        agent_text: str,
        sentiment: SentimentLabel,
        user_ts_ms: int = 0,
        agent_ts_ms: int = 0,
    ) -> "ConversationHistory":
        """Append one completed (user, agent) exchange.

        Empty user text is allowed (an endpointed utterance can transcribe to
        nothing); it is logged rather than rejected.
        """
        if self.exchange_count >= self.max_exchanges:
            raise HistoryLimitExceeded(
                f"session {self.session_id} exceeded {self.max_exchanges} exchanges"
            )
        if not user_text:
            logger.warning("appending exchange with empty user text (session %s)",
                           self.session_id)
        self._turns.append(Turn(role=Role.USER, text=user_text, timestamp_ms=user_ts_ms))
        self._turns.append(
            Turn(role=Role.AGENT, text=agent_text, sentiment=sentiment,
                 timestamp_ms=agent_ts_ms)
        )
        return self


def new_session(
    preprompt: str = DEFAULT_PREPROMPT,
    max_exchanges: int = DEFAULT_MAX_EXCHANGES,
) -> ConversationHistory:
    """Start a fresh conversation containing only the system pre-prompt."""
    return ConversationHistory(preprompt, max_exchanges=max_exchanges)
