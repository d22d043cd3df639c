// Transcript view rows, built either from a GET /session/transcript snapshot
// or accumulated live from turn events. Both paths must produce identical
// rows so a mid-session reload reconstructs the exact same view.

import { SENTIMENT_NAMES, TranscriptRecord, TurnEvent } from "./types.js";

export const BREVITY_LIMIT = 30;

export interface TranscriptRow {
  role: "user" | "agent";
  text: string;
  sentiment: string | null; // human name, e.g. "happy"
  repaired: boolean;
  overLimit: boolean;
}

export function sentimentName(code: string | null): string | null {
  if (!code) return null;
  return SENTIMENT_NAMES[code] ?? code;
}

export function rowsFromRecords(records: TranscriptRecord[]): TranscriptRow[] {
  const rows: TranscriptRow[] = [];
  for (const record of records) {
    if (record.role === "system") continue; // the pre-prompt is not dialog
    rows.push({
      role: record.role,
      text: record.text,
      sentiment: sentimentName(record.sentiment),
      repaired: record.repaired === true,
      overLimit:
        record.role === "agent" &&
        record.word_count !== null &&
        record.word_count > BREVITY_LIMIT,
    });
  }
  return rows;
}

export function rowsFromTurnEvent(event: TurnEvent): TranscriptRow[] {
  return [
    {
      role: "user",
      text: event.user_text,
      sentiment: null,
      repaired: false,
      overLimit: false,
    },
    {
      role: "agent",
      text: event.agent_text,
      sentiment: event.sentiment,
      repaired: event.repaired,
      overLimit: !event.within_limit,
    },
  ];
}
