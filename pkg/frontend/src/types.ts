// Wire types mirroring the console-service JSON payloads.

export type SessionState = "idle" | "listening" | "thinking" | "speaking";

export type JointName =
  | "left_foot"
  | "right_foot"
  | "left_leg"
  | "right_leg"
  | "left_arm"
  | "right_arm"
  | "neck";

export const JOINT_NAMES: JointName[] = [
  "left_foot",
  "right_foot",
  "left_leg",
  "right_leg",
  "left_arm",
  "right_arm",
  "neck",
];

export interface TelemetryFrame {
  t_ms: number;
  angles: Record<JointName, number>;
  active_gesture: string | null;
}

export interface TranscriptRecord {
  session_id: string;
  turn_index: number;
  role: "system" | "user" | "agent";
  text: string;
  sentiment: string | null;
  timestamp_ms: number;
  repaired: boolean | null;
  word_count: number | null;
}

export interface StateEvent {
  type: "state";
  from: SessionState;
  to: SessionState;
  event: string;
  t_ms: number;
}

export interface TurnEvent {
  type: "turn";
  exchange: number;
  user_text: string;
  agent_text: string;
  sentiment: string;
  repaired: boolean;
  word_count: number;
  within_limit: boolean;
  t_ms: number;
}

export interface ErrorEvent {
  type: "error";
  code: string;
  message: string;
  t_ms: number;
}

export type ServiceEvent = StateEvent | TurnEvent | ErrorEvent;

// Single-character sentiment codes as they appear on the wire and in logs.
export const SENTIMENT_NAMES: Record<string, string> = {
  a: "greeting",
  b: "happy",
  c: "sad",
  d: "serious",
  e: "dance",
};
