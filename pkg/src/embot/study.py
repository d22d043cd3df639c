"""Usability-study tooling: condition assignment, survey ingestion, summaries.

Pure batch processing over per-participant Likert (1-5) responses. Item means
are rounded half-up to two decimals, matching how such results are usually
presented.
"""

from __future__ import annotations

import csv
import enum
import random
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from importlib import resources

LIKERT_MIN = 1
LIKERT_MAX = 5

# Advisory session length used when running the protocol. Recorded here as
# metadata for analysts; nothing enforces it (transcript timestamps make the
# actual duration derivable from the logs).
NOMINAL_SESSION_MINUTES = 5

RECONSTRUCTED_DATASET = "reconstructed_pilot.csv"

_REQUIRED_COLUMNS = ("participant_id", "condition_order")
_FREE_TEXT_COLUMN = "free_text"


class StudyError(Exception):
    pass


class TooFewParticipants(StudyError):
    pass


class EmptyDataset(StudyError):
    pass


class SchemaMismatch(StudyError):
    def __init__(self, column: str):
        super().__init__(f"missing required column '{column}'")
        self.column = column


class BadValue(StudyError):
    def __init__(self, row: int, column: str, reason: str):
        super().__init__(f"row {row}, column '{column}': {reason}")
        self.row = row
        self.column = column


class OutOfRangeItem(StudyError):
    def __init__(self, participant: str, item: str, value: int):
        super().__init__(
            f"participant {participant!r}, item {item!r}: {value} not in "
            f"[{LIKERT_MIN}, {LIKERT_MAX}]"
        )
        self.participant = participant
        self.item = item


class ConditionOrder(enum.Enum):
    EMBODIED_FIRST = "embodied_first"
    VOICE_FIRST = "voice_first"


@dataclass(frozen=True)
class SurveyRecord:
    participant_id: str
    condition_order: ConditionOrder
    items: dict[str, int]
    free_text: str = ""


@dataclass(frozen=True)
class ItemSummary:
    mean: float  # rounded half-up to 2 decimals
    count: int
    min: int
    max: int


@dataclass(frozen=True)
class StudySummary:
    items: dict[str, ItemSummary]
    order_counts: dict[ConditionOrder, int]
    count: int


def round_half_up(numerator: int, denominator: int, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    value = Decimal(numerator) / Decimal(denominator)
    return float(value.quantize(quantum, rounding=ROUND_HALF_UP))


def counterbalance(n_participants: int, seed: int = 0) -> list[ConditionOrder]:
    """Assign condition orders as evenly as possible, shuffled by seed.

    Half start with the embodied agent and half with the voice-only agent;
    an odd participant count gives the embodied-first group the extra slot.
    """
    if n_participants < 2:
        raise TooFewParticipants(
            f"counterbalancing needs at least 2 participants, got {n_participants}"
        )
    n_embodied = (n_participants + 1) // 2
    orders = ([ConditionOrder.EMBODIED_FIRST] * n_embodied
              + [ConditionOrder.VOICE_FIRST] * (n_participants - n_embodied))
    random.Random(seed).shuffle(orders)
    return orders


def summarize(records: list[SurveyRecord]) -> StudySummary:
    """Per-item mean/count/min/max plus condition-order counts."""
    if not records:
        raise EmptyDataset("no survey records to summarize")
    values: dict[str, list[int]] = {}
    order_counts = {order: 0 for order in ConditionOrder}
    for record in records:
        order_counts[record.condition_order] += 1
        for item, value in record.items.items():
            if not LIKERT_MIN <= value <= LIKERT_MAX:
                raise OutOfRangeItem(record.participant_id, item, value)
            values.setdefault(item, []).append(value)
    items = {
        item: ItemSummary(
            mean=round_half_up(sum(vs), len(vs)),
            count=len(vs),
            min=min(vs),
            max=max(vs),
        )
        for item, vs in values.items()
    }
    return StudySummary(items=items, order_counts=order_counts, count=len(records))


def _parse_order(token: str, row: int) -> ConditionOrder:
    cleaned = token.strip().lower()
    for order in ConditionOrder:
        if cleaned == order.value or cleaned == order.name.lower():
            return order
    raise BadValue(row, "condition_order", f"unknown order {token!r}")


def ingest_csv(path: str) -> list[SurveyRecord]:
    """Parse a survey CSV into records.

    Expected columns: participant_id, condition_order, one integer column per
    survey item, and an optional trailing free_text column. Item values must
    be in the 1-5 range.
    """
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for column in _REQUIRED_COLUMNS:
            if column not in header:
                raise SchemaMismatch(column)
        item_columns = [
            c for c in header
            if c not in _REQUIRED_COLUMNS and c != _FREE_TEXT_COLUMN
        ]
        records: list[SurveyRecord] = []
        for row_no, row in enumerate(reader, start=2):  # 1-based incl. header
            items: dict[str, int] = {}
            for column in item_columns:
                raw = (row.get(column) or "").strip()
                try:
                    value = int(raw)
                except ValueError:
                    raise BadValue(row_no, column,
                                   f"expected an integer, got {raw!r}") from None
                if not LIKERT_MIN <= value <= LIKERT_MAX:
                    raise BadValue(
                        row_no, column,
                        f"{value} outside [{LIKERT_MIN}, {LIKERT_MAX}]",
                    )
                items[column] = value
            records.append(SurveyRecord(
                participant_id=(row.get("participant_id") or "").strip(),
                condition_order=_parse_order(row.get("condition_order") or "",
                                             row_no),
                items=items,
                free_text=(row.get(_FREE_TEXT_COLUMN) or "").strip(),
            ))
    return records


def reconstructed_dataset_path() -> str:
    """Path to the bundled reconstructed pilot dataset.

    The raw responses are reconstructions chosen to reproduce the published
    per-item means; they are not the original participants' answers.
    """
    return str(resources.files("embot.data").joinpath(RECONSTRUCTED_DATASET))
