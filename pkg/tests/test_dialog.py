"""Dialog-core behavior: labels, history invariants, the state machine."""

import pytest
from hypothesis import given, strategies as st

from embot.dialog import (
    ConversationHistory,
    DEFAULT_PREPROMPT,
    DialogError,
    EmptyPreprompt,
    HistoryLimitExceeded,
    InvalidTransition,
    Role,
    SentimentLabel,
    SessionEvent,
    SessionState,
    Turn,
    enforce_brevity,
    new_session,
    transition,
)


class TestSentimentLabel:
    def test_exactly_five_values(self):
        assert len(SentimentLabel) == 5

    def test_wire_mapping(self):
        expected = {
            SentimentLabel.GREETING: "a",
            SentimentLabel.HAPPY: "b",
            SentimentLabel.SAD: "c",
            SentimentLabel.SERIOUS: "d",
            SentimentLabel.DANCE: "e",
        }
        assert {label: label.wire_char for label in SentimentLabel} == expected

    def test_round_trip_identity(self):
        for label in SentimentLabel:
            assert SentimentLabel.from_wire_char(label.wire_char) is label

    def test_unknown_char_rejected(self):
        with pytest.raises(ValueError):
            SentimentLabel.from_wire_char("z")


class TestTurn:
    def test_sentiment_only_on_agent_turns(self):
        Turn(role=Role.AGENT, text="hi", sentiment=SentimentLabel.HAPPY)
        with pytest.raises(DialogError):
            Turn(role=Role.USER, text="hi", sentiment=SentimentLabel.HAPPY)
        with pytest.raises(DialogError):
            Turn(role=Role.AGENT, text="hi")

    def test_turns_are_frozen(self):
        turn = Turn(role=Role.USER, text="hi")
        with pytest.raises(AttributeError):
            turn.text = "other"


class TestNewSession:
    def test_canonical_preprompt_seeds_history(self):
        history = new_session(DEFAULT_PREPROMPT)
        assert len(history) == 1
        assert history.turns[0].role is Role.SYSTEM
        assert history.turns[0].text == DEFAULT_PREPROMPT

    def test_empty_preprompt_rejected(self):
        with pytest.raises(EmptyPreprompt):
            new_session("")
        with pytest.raises(EmptyPreprompt):
            new_session("   ")

    def test_fresh_session_ids(self):
        assert new_session().session_id != new_session().session_id


class TestAppendExchange:
    def test_growth_by_two(self):
        history = new_session()
        history.append_exchange("hi", "hello", SentimentLabel.GREETING)
        assert len(history) == 3
        history.append_exchange("more", "sure", SentimentLabel.SERIOUS)
        assert len(history) == 5

    def test_agent_turn_carries_sentiment(self):
        history = new_session()
        history.append_exchange("hi", "hello", SentimentLabel.HAPPY)
        assert history.turns[-1].sentiment is SentimentLabel.HAPPY
        assert history.turns[-1].sentiment.wire_char == "b"

    def test_prior_turns_unmodified(self):
        history = new_session()
        history.append_exchange("a", "b", SentimentLabel.SAD)
        before = history.turns[:3]
        history.append_exchange("c", "d", SentimentLabel.DANCE)
        assert history.turns[:3] == before

    def test_preprompt_immutable_across_appends(self):
        history = new_session()
        for _ in range(5):
            history.append_exchange("u", "a", SentimentLabel.SERIOUS)
        assert history.turns[0].text == DEFAULT_PREPROMPT
        assert sum(1 for t in history.turns if t.role is Role.SYSTEM) == 1

    def test_empty_user_text_allowed(self):
        history = new_session()
        history.append_exchange("", "nothing heard", SentimentLabel.SERIOUS)
        assert len(history) == 3

    def test_exchange_cap(self):
        history = new_session(max_exchanges=2)
        history.append_exchange("1", "1", SentimentLabel.HAPPY)
        history.append_exchange("2", "2", SentimentLabel.HAPPY)
        with pytest.raises(HistoryLimitExceeded):
            history.append_exchange("3", "3", SentimentLabel.HAPPY)

    @given(st.integers(min_value=0, max_value=60))
    def test_length_law(self, n):
        history = new_session()
        for i in range(n):
            history.append_exchange(f"u{i}", f"a{i}", SentimentLabel.HAPPY)
        assert len(history) == 1 + 2 * n
        for i, turn in enumerate(history.turns[1:]):
            expected = Role.USER if i % 2 == 0 else Role.AGENT
            assert turn.role is expected


class TestTransition:
    def test_full_cycle(self):
        state = SessionState.IDLE
        state = transition(state, SessionEvent.BUTTON_PRESSED)
        assert state is SessionState.LISTENING
        state = transition(state, SessionEvent.SILENCE_DETECTED)
        assert state is SessionState.THINKING
        state = transition(state, SessionEvent.REPLY_READY)
        assert state is SessionState.SPEAKING
        state = transition(state, SessionEvent.PLAYBACK_DONE)
        assert state is SessionState.IDLE

    def test_abort_from_any_state(self):
        for state in SessionState:
            assert transition(state, SessionEvent.ABORT) is SessionState.IDLE

    def test_every_off_table_pair_is_invalid(self):
        valid = {
            (SessionState.IDLE, SessionEvent.BUTTON_PRESSED),
            (SessionState.LISTENING, SessionEvent.SILENCE_DETECTED),
            (SessionState.THINKING, SessionEvent.REPLY_READY),
            (SessionState.SPEAKING, SessionEvent.PLAYBACK_DONE),
        }
        for state in SessionState:
            for event in SessionEvent:
                if event is SessionEvent.ABORT or (state, event) in valid:
                    continue
                with pytest.raises(InvalidTransition):
                    transition(state, event)

    def test_reachable_states_are_exactly_four(self):
        seen = {SessionState.IDLE}
        frontier = [SessionState.IDLE]
        while frontier:
            state = frontier.pop()
            for event in SessionEvent:
                try:
                    nxt = transition(state, event)
                except InvalidTransition:
                    continue
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        assert seen == set(SessionState)

    def test_idle_silence_is_invalid(self):
        with pytest.raises(InvalidTransition) as exc:
            transition(SessionState.IDLE, SessionEvent.SILENCE_DETECTED)
        assert exc.value.state is SessionState.IDLE
        assert exc.value.event is SessionEvent.SILENCE_DETECTED


class TestBrevity:
    def test_within_limit(self):
        text = " ".join(["word"] * 28)
        report = enforce_brevity(text)
        assert report.word_count == 28
        assert report.within_limit

    def test_over_limit_is_reported_not_truncated(self):
        text = " ".join(["word"] * 31)
        report = enforce_brevity(text)
        assert report.word_count == 31
        assert not report.within_limit
        assert len(text.split()) == 31  # text untouched

    def test_empty_text(self):
        report = enforce_brevity("")
        assert report.word_count == 0
        assert report.within_limit

    def test_boundary_is_inclusive(self):
        assert enforce_brevity(" ".join(["w"] * 30)).within_limit

    def test_punctuation_counts_with_its_token(self):
        assert enforce_brevity("well, ok then!").word_count == 3
