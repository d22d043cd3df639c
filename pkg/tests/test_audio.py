"""Endpointing, capture, and WAV plumbing."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embot.audio import (
    BufferAudioSource,
    CaptureTimeout,
    EndpointerConfig,
    FRAME_MS,
    FRAME_SAMPLES,
    FrameLabel,
    MalformedFrame,
    SAMPLE_RATE,
    SourceClosed,
    UnsupportedWav,
    capture_until_silence,
    classify_frame,
    endpoint,
    read_wav,
    split_frames,
    synthetic_utterance,
    write_wav,
)
from conftest import frames_of, silence, speech


class TestClassifyFrame:
    def test_all_zero_frame_is_silence(self):
        frame = np.zeros(FRAME_SAMPLES, dtype=np.int16)
        assert classify_frame(frame, EndpointerConfig()) is FrameLabel.SILENCE

    def test_full_scale_square_wave_is_speech(self):
        frame = np.full(FRAME_SAMPLES, 32767, dtype=np.int16)
        frame[1::2] = -32767
        assert classify_frame(frame, EndpointerConfig()) is FrameLabel.SPEECH

    def test_threshold_is_inclusive(self):
        # A +/-8192 square wave has RMS exactly 8192, i.e. 0.25 of full scale.
        frame = np.full(FRAME_SAMPLES, 8192, dtype=np.int16)
        frame[1::2] = -8192
        config = EndpointerConfig(energy_threshold=0.25)
        assert classify_frame(frame, config) is FrameLabel.SPEECH

    def test_malformed_frames_rejected(self):
        with pytest.raises(MalformedFrame):
            classify_frame(np.zeros(100, dtype=np.int16), EndpointerConfig())
        with pytest.raises(MalformedFrame):
            classify_frame(np.zeros(FRAME_SAMPLES, dtype=np.float32),
                           EndpointerConfig())


class TestEndpointerConfig:
    def test_defaults_match_one_second_rule(self):
        config = EndpointerConfig()
        assert config.silence_hangover_s == 1.0
        assert config.hangover_frames == 50

    def test_invalid_values_rejected(self):
        with pytest.raises(ValueError):
            EndpointerConfig(silence_hangover_s=0)
        with pytest.raises(ValueError):
            EndpointerConfig(energy_threshold=0)
        with pytest.raises(ValueError):
            EndpointerConfig(energy_threshold=1.5)


class TestEndpoint:
    def test_speech_then_silence(self):
        # 2.0 s speech = 100 frames, 1.0 s silence = exactly the 50-frame
        # hangover, so one span covering frames [0, 100).
        frames = frames_of(np.concatenate([speech(2000), silence(1000)]))
        assert len(frames) == 150
        spans = endpoint(frames)
        assert len(spans) == 1
        start, end = spans[0]
        assert abs(start - 0) <= 1
        assert abs(end - 100) <= 1

    def test_internal_pause_does_not_split(self):
        samples = np.concatenate(
            [speech(800), silence(500), speech(800), silence(1000)])
        spans = endpoint(frames_of(samples))
        assert len(spans) == 1

    def test_all_silence_yields_nothing(self):
        assert endpoint(frames_of(silence(3000))) == []

    def test_trailing_speech_closes_at_end_of_input(self):
        spans = endpoint(frames_of(np.concatenate([silence(400), speech(600)])))
        assert len(spans) == 1
        start, end = spans[0]
        assert start == 20
        assert end == 50

    def test_short_blip_discarded(self):
        # 0.1 s of speech is below the 0.2 s minimum utterance.
        samples = np.concatenate([speech(100), silence(1200)])
        assert endpoint(frames_of(samples)) == []

    def test_concatenation_property(self):
        a = speech(700)
        b = speech(400, freq_hz=300.0)
        frames = frames_of(np.concatenate([a, silence(1500), b]))
        spans = endpoint(frames)
        assert len(spans) == 2
        assert spans[0] == (0, 35)
        assert spans[1] == (35 + 75, 35 + 75 + 20)

    def test_deterministic(self):
        samples = np.concatenate([speech(900), silence(1100), speech(500)])
        frames = frames_of(samples)
        assert endpoint(frames) == endpoint(frames)

    @given(st.lists(st.tuples(st.integers(220, 1200), st.integers(1100, 1600)),
                    min_size=1, max_size=4))
    @settings(max_examples=30, deadline=None)
    def test_spans_strictly_increase_and_never_overlap(self, bursts):
        parts = []
        for speech_ms, gap_ms in bursts:
            parts.append(speech(speech_ms))
            parts.append(silence(gap_ms))
        spans = endpoint(frames_of(np.concatenate(parts)))
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2
        for s, e in spans:
            assert s < e


class TestCapture:
    def test_fixture_capture_matches_endpoint_oracle(self):
        # Independent oracle: run the batch endpointer over the same fixture
        # first, then check capture returns exactly that span's audio.
        samples = np.concatenate([speech(1200), silence(1000)])
        spans = endpoint(frames_of(samples))
        assert spans == [(0, 60)]
        segment = capture_until_silence(BufferAudioSource(samples))
        assert len(segment) == 60 * FRAME_SAMPLES
        assert len(segment) == int(1.2 * SAMPLE_RATE)

    def test_source_closing_mid_utterance(self):
        samples = np.concatenate([speech(600), silence(400)])  # hangover never fires
        with pytest.raises(SourceClosed):
            capture_until_silence(BufferAudioSource(samples))

    def test_continuous_speech_hits_safety_cap(self):
        class EndlessSpeech(BufferAudioSource):
            def __init__(self):
                super().__init__(speech(1000))

            def read_frame(self):
                frame = super().read_frame()
                if frame is None:
                    self._next = 0
                    frame = super().read_frame()
                return frame

        with pytest.raises(CaptureTimeout):
            capture_until_silence(EndlessSpeech())

    def test_blip_before_utterance_is_skipped(self):
        samples = np.concatenate(
            [speech(100), silence(1200), speech(700), silence(1000)])
        segment = capture_until_silence(BufferAudioSource(samples))
        assert len(segment) == 35 * FRAME_SAMPLES

    def test_synthetic_utterance_capture(self):
        segment = capture_until_silence(BufferAudioSource(synthetic_utterance()))
        assert len(segment) == int(0.8 * SAMPLE_RATE)


class TestWav:
    def test_round_trip(self, tmp_path):
        samples = speech(500)
        path = str(tmp_path / "clip.wav")
        write_wav(path, samples)
        assert np.array_equal(read_wav(path), samples)

    def test_wrong_rate_rejected(self, tmp_path):
        import wave

        path = str(tmp_path / "bad.wav")
        with wave.open(path, "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(2)
            w.setframerate(8000)
            w.writeframes(b"\x00\x00" * 100)
        with pytest.raises(UnsupportedWav):
            read_wav(path)

    def test_split_frames_drops_partial_tail(self):
        samples = np.zeros(FRAME_SAMPLES * 3 + 17, dtype=np.int16)
        assert len(split_frames(samples)) == 3
