// Console state and its reducer. The console holds no dialog logic of its
// own: every field is filled from service responses, the event stream, or
// the telemetry stream, which is what makes a mid-session reload lossless.

import {
  rowsFromRecords,
  rowsFromTurnEvent,
  TranscriptRow,
} from "./transcript.js";
import {
  ServiceEvent,
  SessionState,
  TelemetryFrame,
  TranscriptRecord,
} from "./types.js";

export interface ConsoleState {
  sessionId: string | null;
  session: SessionState | null; // null until a session exists
  transcript: TranscriptRow[];
  latestFrame: TelemetryFrame | null; // the only source of joint angles
  activeGesture: string | null;
  eventsConnected: boolean;
  telemetryConnected: boolean;
  toast: string | null;
}

export function initialState(): ConsoleState {
  return {
    sessionId: null,
    session: null,
    transcript: [],
    latestFrame: null,
    activeGesture: null,
    eventsConnected: false,
    telemetryConnected: false,
    toast: null,
  };
}

export type Action =
  | { kind: "session-started"; sessionId: string; state: SessionState }
  | {
      kind: "snapshot";
      sessionId: string;
      state: SessionState;
      records: TranscriptRecord[];
    }
  | { kind: "service-event"; event: ServiceEvent }
  | { kind: "telemetry"; frame: TelemetryFrame }
  | { kind: "stream-status"; stream: "events" | "telemetry"; up: boolean }
  | { kind: "toast"; message: string | null };

export function reduce(state: ConsoleState, action: Action): ConsoleState {
  switch (action.kind) {
    case "session-started":
      return {
        ...state,
        sessionId: action.sessionId,
        session: action.state,
        transcript: [],
        toast: null,
      };
    case "snapshot":
      return {
        ...state,
        sessionId: action.sessionId,
        session: action.state,
        transcript: rowsFromRecords(action.records),
      };
    case "service-event": {
      const event = action.event;
      if (event.type === "state") {
        return { ...state, session: event.to };
      }
      if (event.type === "turn") {
        return {
          ...state,
          transcript: [...state.transcript, ...rowsFromTurnEvent(event)],
        };
      }
      return { ...state, toast: `${event.code}: ${event.message}` };
    }
    case "telemetry":
      return {
        ...state,
        latestFrame: action.frame,
        activeGesture: action.frame.active_gesture,
      };
    case "stream-status":
      if (action.stream === "events") {
        return { ...state, eventsConnected: action.up };
      }
      // On telemetry drop the last frame is kept: the figure freezes rather
      // than snapping to a pose the service never reported.
      return { ...state, telemetryConnected: action.up };
    case "toast":
      return { ...state, toast: action.message };
  }
}

// The button mirrors the service contract: push-to-talk is only legal when
// a session exists and is idle. Anything else renders it disabled so no
// request is even attempted.
export function pttEnabled(state: ConsoleState): boolean {
  return state.session === "idle";
}

export function showReconnectBanner(state: ConsoleState): boolean {
  return state.session !== null &&
    (!state.eventsConnected || !state.telemetryConnected);
}
