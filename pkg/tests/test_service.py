"""Console service: endpoints, single-session rule, streams."""

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from embot.config import ServiceConfig
from embot.service import SessionService, create_app


def make_client(tmp_path, **overrides) -> TestClient:
    config = ServiceConfig(realtime=False, log_dir=str(tmp_path / "logs"),
                           **overrides)
    return TestClient(create_app(config))


def wait_for_state(client: TestClient, state: str, timeout_s: float = 5.0) -> None:
    deadline = time.time() + timeout_s
    while time.time() < deadline:
        if client.get("/healthz").json()["state"] == state:
            return
        time.sleep(0.01)
    raise AssertionError(f"service never reached state {state!r}")


class TestSessionEndpoints:
    def test_start_then_duplicate_is_conflict(self, tmp_path):
        client = make_client(tmp_path)
        first = client.post("/session/start")
        assert first.status_code == 200
        assert first.json()["state"] == "idle"
        dup = client.post("/session/start")
        assert dup.status_code == 409
        assert dup.json()["code"] == "SessionActive"

    def test_ptt_without_session(self, tmp_path):
        client = make_client(tmp_path)
        resp = client.post("/session/ptt")
        assert resp.status_code == 409
        assert resp.json()["code"] == "NoSession"

    def test_ptt_while_idle_starts_listening(self, tmp_path):
        client = make_client(tmp_path)
        client.post("/session/start")
        resp = client.post("/session/ptt")
        assert resp.status_code == 200
        assert resp.json()["state"] == "listening"
        wait_for_state(client, "idle")

    def test_ptt_while_busy_is_conflict(self, tmp_path):
        client = make_client(tmp_path)
        service: SessionService = client.app.state.service

        release = threading.Event()
        inner = service.clients.stt

        class GatedStt:
            def transcribe(self, segment):
                release.wait(timeout=5)
                return inner.transcribe(segment)

        service.clients.stt = GatedStt()
        client.post("/session/start")
        assert client.post("/session/ptt").status_code == 200
        busy = client.post("/session/ptt")
        assert busy.status_code == 409
        body = busy.json()
        assert body["code"] == "SessionBusy"
        assert body["state"] in ("listening", "thinking")
        release.set()
        wait_for_state(client, "idle")

    def test_transcript_after_two_exchanges(self, tmp_path):
        client = make_client(tmp_path)
        client.post("/session/start")
        for _ in range(2):
            assert client.post("/session/ptt").status_code == 200
            wait_for_state(client, "idle")
        records = client.get("/session/transcript").json()["records"]
        assert len(records) == 5  # 1 + 2n
        assert records[0]["role"] == "system"
        assert [r["role"] for r in records[1:]] == ["user", "agent"] * 2
        assert records[2]["sentiment"] in list("abcde")

    def test_healthz_reports_adapters(self, tmp_path):
        client = make_client(tmp_path)
        health = client.get("/healthz").json()
        assert health["adapters"] == {
            "stt": "stub", "llm": "stub", "tts": "stub", "device": "virtual",
        }
        assert health["session_active"] is False

    def test_turn_is_persisted_to_log_dir(self, tmp_path):
        client = make_client(tmp_path)
        client.post("/session/start")
        client.post("/session/ptt")
        wait_for_state(client, "idle")
        logs = list((tmp_path / "logs").glob("session-*.jsonl"))
        assert len(logs) == 1
        lines = logs[0].read_text().strip().splitlines()
        assert len(lines) == 3


class TestBroadcast:
    def test_fan_out_to_all_subscribers(self):
        from embot.service import Broadcast

        hub = Broadcast()
        q1, q2 = hub.subscribe(), hub.subscribe()
        hub.publish({"n": 1})
        assert q1.get(timeout=1) == {"n": 1}
        assert q2.get(timeout=1) == {"n": 1}
        hub.unsubscribe(q1)
        hub.publish({"n": 2})
        assert q2.get(timeout=1) == {"n": 2}
        assert q1.empty()

    def test_sse_frames_are_data_lines(self):
        from embot.service import Broadcast, _sse

        hub = Broadcast()
        gen = _sse(hub)
        hub.publish({"type": "state", "to": "listening"})
        line = next(gen)
        assert line.startswith("data: ")
        assert json.loads(line[len("data: "):-2]) == {
            "type": "state", "to": "listening"}
        gen.close()  # must unsubscribe cleanly


@pytest.fixture
def live_server(tmp_path):
    """A real uvicorn server on a free port; SSE needs true disconnects."""
    import socket

    import httpx
    import uvicorn

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]

    config = ServiceConfig(realtime=False, log_dir=str(tmp_path / "logs"))
    app = create_app(config)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("uvicorn did not start")
        time.sleep(0.01)
    base = f"http://127.0.0.1:{port}"
    with httpx.Client(base_url=base, timeout=10.0) as client:
        yield client
    server.should_exit = True
    thread.join(timeout=5)


def read_sse(client, path, stop_after, timeout_s=8.0):
    """Collect SSE payloads from a live server until a predicate matches."""
    events = []
    deadline = time.time() + timeout_s
    with client.stream("GET", path) as resp:
        for line in resp.iter_lines():
            if time.time() > deadline:
                break
            if not line.startswith("data: "):
                continue
            payload = json.loads(line[len("data: "):])
            events.append(payload)
            if stop_after(payload):
                break
    return events


class TestStreams:
    def test_event_and_telemetry_streams(self, live_server):
        assert live_server.post("/session/start").status_code == 200

        results = {}

        def consume_events():
            # The turn summary is the last event a completed turn publishes.
            results["events"] = read_sse(
                live_server, "/events",
                stop_after=lambda e: e.get("type") == "turn",
            )

        def consume_telemetry():
            results["frames"] = read_sse(
                live_server, "/telemetry",
                stop_after=lambda f: f.get("active_gesture") is None
                and f.get("t_ms", 0) > 500,
            )

        readers = [threading.Thread(target=consume_events),
                   threading.Thread(target=consume_telemetry)]
        for r in readers:
            r.start()
        time.sleep(0.3)  # let both streams subscribe before the turn runs
        assert live_server.post("/session/ptt").status_code == 200
        for r in readers:
            r.join(timeout=15)
            assert not r.is_alive()

        states = [(e["from"], e["to"]) for e in results["events"]
                  if e["type"] == "state"]
        assert states == [
            ("idle", "listening"),
            ("listening", "thinking"),
            ("thinking", "speaking"),
            ("speaking", "idle"),
        ]
        turn_events = [e for e in results["events"] if e["type"] == "turn"]
        assert turn_events and "within_limit" in turn_events[0]

        frames = results["frames"]
        assert frames
        actives = {f["active_gesture"] for f in frames if f["active_gesture"]}
        assert len(actives) == 1  # the scripted first reply's gesture
        for frame in frames:
            assert set(frame["angles"]) == {
                "left_foot", "right_foot", "left_leg", "right_leg",
                "left_arm", "right_arm", "neck",
            }
            assert all(0 <= a <= 180 for a in frame["angles"].values())
