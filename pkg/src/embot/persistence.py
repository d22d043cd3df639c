"""Append-only transcript logs and lossless replay.

One JSON record per line, one line per turn. Appends are crash-tolerant: a
torn final line costs that line only, never the records before it, and replay
reports exactly which line is bad.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .dialog import (
    ConversationHistory,
    Role,
    SentimentLabel,
    Turn,
    enforce_brevity,
)

_RECORD_KEYS = {
    "session_id", "turn_index", "role", "text", "sentiment",
    "timestamp_ms", "repaired", "word_count",
}


class PersistenceError(Exception):
    pass


class EmptyLog(PersistenceError):
    pass


class CorruptLogLine(PersistenceError):
    """A log line failed to parse or broke the history invariants.

    `partial` carries whatever history the preceding records replayed into,
    so a torn tail never loses the rest of the session.
    """

    def __init__(self, line_no: int, reason: str,
                 partial: ConversationHistory | None = None):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.partial = partial


@dataclass(frozen=True)
class SessionLogRecord:
    session_id: str
    turn_index: int
    role: Role
    text: str
    timestamp_ms: int
    sentiment: SentimentLabel | None = None
    repaired: bool | None = None
    word_count: int | None = None

    def to_json(self) -> str:
        payload = {
            "session_id": self.session_id,
            "turn_index": self.turn_index,
            "role": self.role.value,
            "text": self.text,
            "sentiment": self.sentiment.wire_char if self.sentiment else None,
            "timestamp_ms": self.timestamp_ms,
            "repaired": self.repaired,
            "word_count": self.word_count,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "SessionLogRecord":
        payload = json.loads(line)
        if not isinstance(payload, dict):
            raise ValueError("record is not an object")
        missing = _RECORD_KEYS - set(payload)
        if missing:
            raise ValueError(f"record missing fields {sorted(missing)}")
        sentiment = payload["sentiment"]
        return cls(
            session_id=str(payload["session_id"]),
            turn_index=int(payload["turn_index"]),
            role=Role(payload["role"]),
            text=str(payload["text"]),
            timestamp_ms=int(payload["timestamp_ms"]),
            sentiment=SentimentLabel(sentiment) if sentiment else None,
            repaired=payload["repaired"],
            word_count=payload["word_count"],
        )


def record_for_turn(
    session_id: str, index: int, turn: Turn, repaired: bool | None = None
) -> SessionLogRecord:
    is_agent = turn.role is Role.AGENT
    return SessionLogRecord(
        session_id=session_id,
        turn_index=index,
        role=turn.role,
        text=turn.text,
        timestamp_ms=turn.timestamp_ms,
        sentiment=turn.sentiment,
        repaired=(bool(repaired) if is_agent else None),
        word_count=(enforce_brevity(turn.text).word_count if is_agent else None),
    )


class TranscriptWriter:
    """Appends records to a session log file, keeping an in-memory mirror."""

    def __init__(self, path: str):
        self.path = path
        self.records: list[SessionLogRecord] = []
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._file = open(path, "a", encoding="utf-8")

    def append(self, record: SessionLogRecord) -> None:
        self._file.write(record.to_json() + "\n")
        self._file.flush()
        self.records.append(record)

    def close(self) -> None:
        self._file.close()


def history_records(
    history: ConversationHistory,
    repaired_flags: dict[int, bool] | None = None,
) -> list[SessionLogRecord]:
    """Records for a whole history; agent repair flags default to False."""
    flags = repaired_flags or {}
    return [
        record_for_turn(history.session_id, i, turn, repaired=flags.get(i, False))
        for i, turn in enumerate(history.turns)
    ]


def persist_history(
    history: ConversationHistory,
    path: str,
    repaired_flags: dict[int, bool] | None = None,
) -> None:
    """Write a full history to a fresh log file."""
    records = history_records(history, repaired_flags)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(record.to_json() + "\n")


def read_records(path: str) -> list[SessionLogRecord]:
    records: list[SessionLogRecord] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(SessionLogRecord.from_json(line))
            except (json.JSONDecodeError, ValueError, KeyError) as e:
                raise CorruptLogLine(line_no, str(e),
                                     partial=_assemble(records)) from e
    return records


def _assemble(records: list[SessionLogRecord]) -> ConversationHistory | None:
    """Rebuild a history from whole exchanges; returns None without a header."""
    if not records or records[0].role is not Role.SYSTEM:
        return None
    history = ConversationHistory(records[0].text,
                                  session_id=records[0].session_id)
    body = records[1:]
    for i in range(0, len(body) - 1, 2):
        user, agent = body[i], body[i + 1]
        if user.role is not Role.USER or agent.role is not Role.AGENT:
            return history
        history.append_exchange(
            user.text, agent.text, agent.sentiment,
            user_ts_ms=user.timestamp_ms, agent_ts_ms=agent.timestamp_ms,
        )
    return history


def replay(path: str) -> ConversationHistory:
    """Reconstruct the exact ConversationHistory a log was written from."""
    records = read_records(path)
    if not records:
        raise EmptyLog(f"{path} has no records")
    if records[0].role is not Role.SYSTEM or records[0].turn_index != 0:
        raise CorruptLogLine(1, "first record must be the system pre-prompt")
    history = ConversationHistory(records[0].text,
                                  session_id=records[0].session_id)
    body = records[1:]
    if len(body) % 2 != 0:
        raise CorruptLogLine(
            len(records), "dangling user turn without an agent reply",
            partial=_assemble(records[:-1]),
        )
    for i in range(0, len(body), 2):
        user, agent = body[i], body[i + 1]
        line_no = 2 + i
        if user.role is not Role.USER:
            raise CorruptLogLine(line_no, f"expected user turn, got {user.role.value}",
                                 partial=_assemble(records[:i + 1]))
        if agent.role is not Role.AGENT or agent.sentiment is None:
            raise CorruptLogLine(line_no + 1, "expected agent turn with sentiment",
                                 partial=_assemble(records[:i + 1]))
        history.append_exchange(
            user.text, agent.text, agent.sentiment,
            user_ts_ms=user.timestamp_ms, agent_ts_ms=agent.timestamp_ms,
        )
    return history
