// HTTP and SSE access to the console service. The console talks to these
// endpoints and nothing else.

import { ServiceEvent, SessionState, TelemetryFrame, TranscriptRecord } from "./types.js";

export interface ApiResult<T> {
  ok: boolean;
  status: number;
  body: T | null;
  error: { code: string; message: string } | null;
}

async function post<T>(path: string): Promise<ApiResult<T>> {
  try {
    const resp = await fetch(path, { method: "POST" });
    const body = await resp.json().catch(() => null);
    if (!resp.ok) {
      return {
        ok: false,
        status: resp.status,
        body: null,
        error: body ?? { code: "HttpError", message: `status ${resp.status}` },
      };
    }
    return { ok: true, status: resp.status, body: body as T, error: null };
  } catch (e) {
    return {
      ok: false,
      status: 0,
      body: null,
      error: { code: "NetworkError", message: String(e) },
    };
  }
}

export function startSession() {
  return post<{ session_id: string; state: SessionState }>("/session/start");
}

export function pressPtt() {
  return post<{ state: SessionState }>("/session/ptt");
}

export async function fetchTranscript(): Promise<
  ApiResult<{ session_id: string; state: SessionState; records: TranscriptRecord[] }>
> {
  try {
    const resp = await fetch("/session/transcript");
    const body = await resp.json().catch(() => null);
    if (!resp.ok) {
      return { ok: false, status: resp.status, body: null, error: body };
    }
    return { ok: true, status: resp.status, body, error: null };
  } catch (e) {
    return {
      ok: false,
      status: 0,
      body: null,
      error: { code: "NetworkError", message: String(e) },
    };
  }
}

export function connectEvents(
  onEvent: (event: ServiceEvent) => void,
  onStatus: (up: boolean) => void,
): EventSource {
  return connectStream("/events", onEvent, onStatus);
}

export function connectTelemetry(
  onFrame: (frame: TelemetryFrame) => void,
  onStatus: (up: boolean) => void,
): EventSource {
  return connectStream("/telemetry", onFrame, onStatus);
}

function connectStream<T>(
  path: string,
  onMessage: (payload: T) => void,
  onStatus: (up: boolean) => void,
): EventSource {
  const source = new EventSource(path);
  source.onopen = () => onStatus(true);
  source.onerror = () => onStatus(false); // EventSource retries on its own
  source.onmessage = (e) => {
    try {
      onMessage(JSON.parse(e.data) as T);
    } catch {
      // ignore malformed stream lines
    }
  };
  return source;
}
