// Console wiring: fetch the snapshot, subscribe to both streams, and render.
// Rendering runs at display refresh rate but only ever draws the latest
// telemetry frame that actually arrived; nothing is extrapolated.

import {
  connectEvents,
  connectTelemetry,
  fetchTranscript,
  pressPtt,
  startSession,
} from "./api.js";
import { applyRotations, limbRotations, neutralRotations } from "./robot.js";
import {
  Action,
  ConsoleState,
  initialState,
  pttEnabled,
  reduce,
  showReconnectBanner,
} from "./store.js";

let state: ConsoleState = initialState();

function dispatch(action: Action): void {
  state = reduce(state, action);
  renderChrome();
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderChrome(): void {
  const stateLabel = el<HTMLSpanElement>("session-state");
  stateLabel.textContent = state.session ?? "no session";
  stateLabel.dataset.state = state.session ?? "none";

  el<HTMLButtonElement>("ptt").disabled = !pttEnabled(state);
  el<HTMLButtonElement>("start").disabled = state.session !== null;

  el<HTMLDivElement>("banner").hidden = !showReconnectBanner(state);

  const toast = el<HTMLDivElement>("toast");
  toast.hidden = state.toast === null;
  toast.textContent = state.toast ?? "";

  const gesture = el<HTMLSpanElement>("gesture");
  gesture.textContent = state.activeGesture ?? "idle";

  renderTranscript();
}

function renderTranscript(): void {
  const list = el<HTMLUListElement>("transcript");
  list.replaceChildren(
    ...state.transcript.map((row) => {
      const item = document.createElement("li");
      item.className = `row ${row.role}`;
      const who = document.createElement("span");
      who.className = "who";
      who.textContent = row.role === "user" ? "you" : "robot";
      item.append(who, ` ${row.text} `);
      if (row.sentiment) {
        item.append(badge(row.sentiment, `sentiment ${row.sentiment}`));
      }
      if (row.repaired) {
        item.append(badge("repaired", "flag"));
      }
      if (row.overLimit) {
        item.append(badge("over 30 words", "flag"));
      }
      return item;
    }),
  );
  list.scrollTop = list.scrollHeight;
}

function badge(text: string, className: string): HTMLSpanElement {
  const span = document.createElement("span");
  span.className = `badge ${className}`;
  span.textContent = text;
  return span;
}

function renderRobot(): void {
  const svg = el<HTMLElement>("robot");
  const rotations = state.latestFrame
    ? limbRotations(state.latestFrame.angles)
    : neutralRotations();
  applyRotations(svg, rotations);
  requestAnimationFrame(renderRobot);
}

async function onStart(): Promise<void> {
  const result = await startSession();
  if (result.ok && result.body) {
    dispatch({
      kind: "session-started",
      sessionId: result.body.session_id,
      state: result.body.state,
    });
  } else if (result.error) {
    dispatch({ kind: "toast", message: `${result.error.code}: ${result.error.message}` });
  }
}

async function onPtt(): Promise<void> {
  if (!pttEnabled(state)) return; // disabled button also guards this
  const result = await pressPtt();
  if (result.ok && result.body) {
    dispatch({ kind: "service-event", event: {
      type: "state", from: "idle", to: result.body.state,
      event: "button_pressed", t_ms: 0,
    }});
  } else if (result.error) {
    // A 409 leaves our state untouched: just surface the error.
    dispatch({ kind: "toast", message: `${result.error.code}: ${result.error.message}` });
  }
}

async function reloadSnapshot(): Promise<void> {
  const result = await fetchTranscript();
  if (result.ok && result.body) {
    dispatch({
      kind: "snapshot",
      sessionId: result.body.session_id,
      state: result.body.state,
      records: result.body.records,
    });
  }
}

function bootstrap(): void {
  el<HTMLButtonElement>("start").addEventListener("click", onStart);
  el<HTMLButtonElement>("ptt").addEventListener("click", onPtt);

  connectEvents(
    (event) => dispatch({ kind: "service-event", event }),
    (up) => dispatch({ kind: "stream-status", stream: "events", up }),
  );
  connectTelemetry(
    (frame) => dispatch({ kind: "telemetry", frame }),
    (up) => dispatch({ kind: "stream-status", stream: "telemetry", up }),
  );

  // Reconstruct the current session (if any) after a reload.
  void reloadSnapshot();
  renderChrome();
  requestAnimationFrame(renderRobot);
}

bootstrap();
