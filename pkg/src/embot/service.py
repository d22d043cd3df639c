"""Operator-facing HTTP service: session control, transcripts, live streams.

The physical push-button, the web console, and the test suite all go through
POST /session/ptt, so there is exactly one code path into the state machine.
Request handlers only enqueue work; a single worker thread runs the session
loop, which keeps every history and state mutation serialized.
"""

from __future__ import annotations

import json
import logging
import os
import queue
import threading
from typing import Iterator

from fastapi import FastAPI
from fastapi.responses import JSONResponse, StreamingResponse

from .config import (
    ServiceConfig,
    build_clients,
    build_device,
    build_sink,
    build_source_factory,
    build_table,
)
from .device import VirtualDevice
from .persistence import TranscriptWriter
from .session import SessionBusy, SessionRunner, SystemClock, VirtualClock

logger = logging.getLogger(__name__)

SSE_KEEPALIVE_S = 10.0
DRIVER_PERIOD_S = 0.05


class Broadcast:
    """Fan-out of dict payloads to any number of subscriber queues."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subscribers: list[queue.Queue] = []

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, item: dict) -> None:
        with self._lock:
            subscribers = list(self._subscribers)
        for q in subscribers:
            q.put(item)


def _error(status: int, code: str, message: str, state: str | None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "state": state},
    )


class SessionService:
    """Owns the single active session and its worker/driver threads."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.events = Broadcast()
        self.telemetry = Broadcast()
        self._lock = threading.Lock()
        self._runner: SessionRunner | None = None
        self._jobs: queue.Queue = queue.Queue()
        self._stop = threading.Event()

        self.table = build_table(config)
        self.device = build_device(config, self.table)
        self.clients = build_clients(config)

        self._worker = threading.Thread(target=self._work_loop, daemon=True,
                                        name="session-worker")
        self._worker.start()
        if config.realtime and isinstance(self.device, VirtualDevice):
            self._driver = threading.Thread(target=self._drive_device, daemon=True,
                                            name="device-driver")
            self._driver.start()

    # -- worker / driver loops -------------------------------------------

    def _work_loop(self) -> None:
        while not self._stop.is_set():
            try:
                job = self._jobs.get(timeout=0.2)
            except queue.Empty:
                continue
            if job is None:
                break
            runner = self._runner
            if runner is None:
                continue
            try:
                runner.finish_turn()
            except Exception as e:  # already surfaced on the event stream
                logger.error("turn failed: %s", e)

    def _drive_device(self) -> None:
        clock = SystemClock()
        while not self._stop.is_set():
            frames = self.device.step(clock.now_ms())
            for frame in frames:
                self.telemetry.publish(frame.as_dict())
            self._stop.wait(DRIVER_PERIOD_S)

    def close(self) -> None:
        self._stop.set()
        self._jobs.put(None)

    # -- session control ---------------------------------------------------

    def state_name(self) -> str | None:
        runner = self._runner
        return runner.state.value if runner else None

    def start_session(self) -> dict:
        with self._lock:
            if self._runner is not None:
                raise SessionActive(self._runner.session_id)
            clock = SystemClock() if self.config.realtime else VirtualClock()
            sink = build_sink(self.config)
            runner = SessionRunner(
                clients=self.clients,
                audio_source_factory=build_source_factory(self.config),
                device=self.device,
                audio_sink=sink,
                endpointer=self.config.endpointer(),
                clock=clock,
                on_event=self.events.publish,
                on_telemetry=(
                    None if self.config.realtime
                    else lambda f: self.telemetry.publish(f.as_dict())
                ),
                autostep_device=(
                    not self.config.realtime
                    and isinstance(self.device, VirtualDevice)
                ),
                transcript_writer=TranscriptWriter(self._log_path()),
            )
            self._runner = runner
            return {"session_id": runner.session_id, "state": runner.state.value}

    def _log_path(self) -> str:
        os.makedirs(self.config.log_dir, exist_ok=True)
        import uuid

        return os.path.join(self.config.log_dir, f"session-{uuid.uuid4().hex}.jsonl")

    def press_button(self) -> dict:
        with self._lock:
            runner = self._runner
            if runner is None:
                raise NoSession()
            runner.begin_turn()  # raises SessionBusy unless idle
            self._jobs.put("turn")
            return {"state": runner.state.value}

    def transcript(self) -> dict:
        runner = self._runner
        if runner is None:
            raise NoSession()
        records = runner.writer.records if runner.writer else []
        return {
            "session_id": runner.session_id,
            "state": runner.state.value,
            "records": [json.loads(r.to_json()) for r in records],
        }

    def health(self) -> dict:
        return {
            "status": "ok",
            "adapters": {
                "stt": self.config.stt,
                "llm": self.config.llm,
                "tts": self.config.tts,
                "device": self.config.device,
            },
            "session_active": self._runner is not None,
            "state": self.state_name(),
        }


class SessionActive(Exception):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} already active")
        self.session_id = session_id


class NoSession(Exception):
    def __init__(self):
        super().__init__("no active session; POST /session/start first")


def _sse(source: Broadcast) -> Iterator[str]:
    """Subscribe immediately; yield one `data:` line per published payload."""
    q = source.subscribe()

    def generate() -> Iterator[str]:
        try:
            while True:
                try:
                    item = q.get(timeout=SSE_KEEPALIVE_S)
                except queue.Empty:
                    yield ": keepalive\n\n"
                    continue
                yield f"data: {json.dumps(item)}\n\n"
        finally:
            source.unsubscribe(q)

    return generate()


def create_app(config: ServiceConfig | None = None,
               service: SessionService | None = None) -> FastAPI:
    """Build the FastAPI app around one SessionService."""
    config = config or ServiceConfig()
    svc = service or SessionService(config)
    app = FastAPI(title="embot console service")
    app.state.service = svc

    @app.post("/session/start")
    def session_start():
        try:
            return svc.start_session()
        except SessionActive as e:
            return _error(409, "SessionActive", str(e), svc.state_name())

    @app.post("/session/ptt")
    def session_ptt():
        try:
            return svc.press_button()
        except NoSession as e:
            return _error(409, "NoSession", str(e), None)
        except SessionBusy as e:
            return _error(409, "SessionBusy", str(e), e.state.value)

    @app.get("/session/transcript")
    def session_transcript():
        try:
            return svc.transcript()
        except NoSession as e:
            return _error(409, "NoSession", str(e), None)

    @app.get("/healthz")
    def healthz():
        return svc.health()

    @app.get("/events")
    def events():
        return StreamingResponse(_sse(svc.events),
                                 media_type="text/event-stream")

    @app.get("/telemetry")
    def telemetry():
        return StreamingResponse(_sse(svc.telemetry),
                                 media_type="text/event-stream")

    _mount_console(app)
    return app


def _mount_console(app: FastAPI) -> None:
    """Serve the operator console statically when a build is present."""
    for candidate in ("frontend", os.path.join(os.path.dirname(__file__),
                                               "..", "..", "frontend")):
        index = os.path.join(candidate, "index.html")
        if os.path.exists(index):
            from fastapi.staticfiles import StaticFiles

            app.mount("/console", StaticFiles(directory=candidate, html=True),
                      name="console")
            return
