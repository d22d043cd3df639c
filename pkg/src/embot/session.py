"""Session wiring: one push-to-talk loop owning the state machine.

The runner is transport-agnostic: the console service drives it from HTTP
handlers, tests and the CLI drive it directly. A virtual clock makes a whole
scripted session (including gesture playback) run in milliseconds of wall
time while keeping every timestamp deterministic.
"""

from __future__ import annotations

import logging
import time
from typing import Callable

from .audio import (
    AudioError,
    AudioSink,
    AudioSource,
    EndpointerConfig,
    NullAudioSink,
    SAMPLE_RATE,
    capture_until_silence,
)
from .clients import ClientBundle
from .dialog import (
    ConversationHistory,
    DEFAULT_BREVITY_LIMIT,
    DEFAULT_MAX_EXCHANGES,
    DEFAULT_PREPROMPT,
    SessionEvent,
    SessionState,
    new_session,
    transition,
)
from .persistence import TranscriptWriter, record_for_turn
from .pipeline import PipelineError, TurnOutcome, run_turn

logger = logging.getLogger(__name__)

DEVICE_STEP_MS = 50.0


class SessionBusy(Exception):
    """The button was pressed while a turn is already in flight."""

    def __init__(self, state: SessionState):
        super().__init__(f"session is {state.value}, not idle")
        self.state = state


class SystemClock:
    def now_ms(self) -> float:
        return time.monotonic() * 1000.0

    def sleep_ms(self, ms: float) -> None:
        if ms > 0:
            time.sleep(ms / 1000.0)


class VirtualClock:
    """Deterministic clock: sleeping just advances the reading."""

    def __init__(self, start_ms: float = 0.0):
        self._now = start_ms

    def now_ms(self) -> float:
        return self._now

    def sleep_ms(self, ms: float) -> None:
        if ms > 0:
            self._now += ms


class SessionRunner:
    """Owns one conversation: history, state, capture, pipeline, device.

    All mutation happens on whichever single thread calls press_button /
    finish_turn; observers get immutable snapshots through the callbacks.
    """

    def __init__(
        self,
        clients: ClientBundle,
        audio_source_factory: Callable[[], AudioSource],
        device,
        audio_sink: AudioSink | None = None,
        endpointer: EndpointerConfig | None = None,
        preprompt: str = DEFAULT_PREPROMPT,
        max_exchanges: int = DEFAULT_MAX_EXCHANGES,
        brevity_limit: int = DEFAULT_BREVITY_LIMIT,
        clock=None,
        transcript_writer: TranscriptWriter | None = None,
        on_event: Callable[[dict], None] | None = None,
        on_telemetry=None,
        autostep_device: bool = False,
    ):
        self.clients = clients
        self.audio_source_factory = audio_source_factory
        self.device = device
        self.audio_sink = audio_sink or NullAudioSink()
        self.endpointer = endpointer or EndpointerConfig()
        self.brevity_limit = brevity_limit
        self.clock = clock or SystemClock()
        self.writer = transcript_writer
        self.on_event = on_event
        self.on_telemetry = on_telemetry
        self.autostep_device = autostep_device

        self.state = SessionState.IDLE
        self.history: ConversationHistory = new_session(preprompt, max_exchanges)
        self._t0 = self.clock.now_ms()
        self.outcomes: list[TurnOutcome] = []
        self._persist_turn(0)

    @property
    def session_id(self) -> str:
        return self.history.session_id

    def now_session_ms(self) -> int:
        return int(self.clock.now_ms() - self._t0)

    def _emit(self, payload: dict) -> None:
        if self.on_event is not None:
            self.on_event(payload)

    def _transition(self, event: SessionEvent) -> None:
        old = self.state
        self.state = transition(self.state, event)
        self._emit({
            "type": "state",
            "from": old.value,
            "to": self.state.value,
            "event": event.value,
            "t_ms": self.now_session_ms(),
        })

    def _persist_turn(self, index: int, repaired: bool | None = None) -> None:
        if self.writer is None:
            return
        turn = self.history.turns[index]
        self.writer.append(record_for_turn(self.session_id, index, turn, repaired))

    def _send_to_device(self, frame: bytes) -> None:
        self.device.send(frame, now_ms=self.clock.now_ms())

    def _autostep_speaking(self, audio_ms: float) -> None:
        """Run the speaking phase on the session clock, stepping the device.

        Gesture playback and audio playback overlap, so the phase lasts
        until both the audio window has elapsed and the gesture has parked.
        On a virtual clock this finishes in microseconds of wall time.
        """
        start = self.clock.now_ms()
        while (self.clock.now_ms() - start < audio_ms
               or getattr(self.device, "active", False)):
            self.clock.sleep_ms(DEVICE_STEP_MS)
            self._publish_telemetry(self.device.step(self.clock.now_ms()))

    def _publish_telemetry(self, frames) -> None:
        if self.on_telemetry is not None:
            for frame in frames:
                self.on_telemetry(frame)

    def begin_turn(self) -> SessionState:
        """Handle the button press; raises SessionBusy unless idle."""
        if self.state is not SessionState.IDLE:
            raise SessionBusy(self.state)
        self._transition(SessionEvent.BUTTON_PRESSED)
        return self.state

    def finish_turn(self) -> TurnOutcome:
        """Run the rest of the turn: capture, think, speak, back to idle."""
        try:
            source = self.audio_source_factory()
            try:
                segment = capture_until_silence(source, self.endpointer)
            finally:
                source.close()
            self._transition(SessionEvent.SILENCE_DETECTED)

            outcome = run_turn(
                self.history, segment, self.clients, self._send_to_device,
                brevity_limit=self.brevity_limit, now_ms=self.now_session_ms,
            )
            self._transition(SessionEvent.REPLY_READY)

            self.audio_sink.play(outcome.audio_out)
            if self.autostep_device:
                audio_ms = 1000.0 * len(outcome.audio_out) / SAMPLE_RATE
                self._autostep_speaking(audio_ms)
            self._transition(SessionEvent.PLAYBACK_DONE)
        except (AudioError, PipelineError) as e:
            logger.error("turn aborted: %s", e)
            self._emit({
                "type": "error",
                "code": type(e).__name__,
                "message": str(e),
                "t_ms": self.now_session_ms(),
            })
            self._transition(SessionEvent.ABORT)
            raise

        n = len(self.history)
        self._persist_turn(n - 2)
        self._persist_turn(n - 1, repaired=outcome.repaired)
        self.outcomes.append(outcome)
        self._emit({
            "type": "turn",
            "exchange": self.history.exchange_count,
            "user_text": outcome.user_turn.text,
            "agent_text": outcome.agent_turn.text,
            "sentiment": outcome.dispatched_sentiment.name.lower(),
            "repaired": outcome.repaired,
            "word_count": outcome.brevity.word_count,
            "within_limit": outcome.brevity.within_limit,
            "audio_out_ms": 1000.0 * len(outcome.audio_out) / SAMPLE_RATE,
            "timings_ms": outcome.timings_ms,
            "t_ms": self.now_session_ms(),
        })
        return outcome

    def press_button(self) -> TurnOutcome:
        """One full push-to-talk turn, synchronously."""
        self.begin_turn()
        return self.finish_turn()
