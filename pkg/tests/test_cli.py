"""CLI subcommands: study, simulate, replay."""

import pytest

from embot.cli import main
from embot.dialog import SentimentLabel, new_session
from embot.persistence import persist_history
from embot.study import reconstructed_dataset_path


class TestStudyCli:
    def test_summarize_prints_means(self, capsys):
        assert main(["study", "summarize", reconstructed_dataset_path()]) == 0
        out = capsys.readouterr().out
        assert "4.33" in out
        assert "2.83" in out
        assert "3.67" in out
        assert "6 participants" in out

    def test_summarize_rejects_bad_file(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("participant_id,q1\np1,4\n")
        assert main(["study", "summarize", str(path)]) == 1
        assert "condition_order" in capsys.readouterr().err

    def test_assign_splits_evenly(self, capsys):
        assert main(["study", "assign", "--n", "6", "--seed", "3"]) == 0
        out = capsys.readouterr().out
        assert out.count("embodied_first") == 3
        assert out.count("voice_first") == 3

    def test_assign_too_few(self, capsys):
        assert main(["study", "assign", "--n", "1"]) == 1


class TestSimulateCli:
    def test_telemetry_csv(self, capsys):
        assert main(["simulate", "--gesture", "greeting", "--seed", "4"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("t_ms,left_foot")
        assert len(lines) > 10
        assert any(",greeting" in line for line in lines)

    def test_unknown_gesture(self, capsys):
        assert main(["simulate", "--gesture", "confused"]) == 2
        assert "choose from" in capsys.readouterr().err


class TestReplayCli:
    def test_replay_prints_transcript(self, tmp_path, capsys):
        history = new_session()
        history.append_exchange("hi there", "hello again",
                                SentimentLabel.GREETING)
        path = str(tmp_path / "log.jsonl")
        persist_history(history, path)
        assert main(["replay", path]) == 0
        out = capsys.readouterr().out
        assert "1 exchanges" in out
        assert "hello again" in out
        assert "[greeting]" in out

    def test_replay_reports_corruption(self, tmp_path, capsys):
        path = tmp_path / "log.jsonl"
        path.write_text("not json\n")
        assert main(["replay", str(path)]) == 1
        assert "replay failed" in capsys.readouterr().err
