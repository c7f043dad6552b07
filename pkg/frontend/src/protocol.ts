// Wire protocol (version 1): one JSON object per frame.
// The client treats events as opaque: it displays `text` and echoes the
// object back verbatim in choose frames, so all semantics stay server-side.

export interface EventInfo {
  channel: string;
  value: unknown;
  text: string;
}

export type ServerFrame =
  | { type: "hello"; protocol: number; process: string }
  | { type: "menu"; events: EventInfo[] }
  | { type: "stateNote"; text: string }
  | { type: "activity" }
  | { type: "accepted"; event: EventInfo }
  | { type: "rejected"; input: unknown; reason: string }
  | { type: "manySteps"; count: number }
  | { type: "terminated"; value: unknown }
  | { type: "deadlocked" }
  | { type: "ended" };

export type ClientFrame =
  | { type: "choose"; event: EventInfo }
  | { type: "choose"; index: number }
  | { type: "continue" }
  | { type: "end" }
  | { type: "reset" };

const KNOWN = new Set([
  "hello",
  "menu",
  "stateNote",
  "activity",
  "accepted",
  "rejected",
  "manySteps",
  "terminated",
  "deadlocked",
  "ended",
]);

export function parseServerFrame(raw: string): ServerFrame | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const t = (obj as { type?: unknown }).type;
  if (typeof t !== "string" || !KNOWN.has(t)) return null;
  return obj as ServerFrame;
}

export function sameEvent(a: EventInfo, b: EventInfo): boolean {
  return a.channel === b.channel && JSON.stringify(a.value) === JSON.stringify(b.value);
}

export function formatValue(v: unknown): string {
  if (v === null) return "()";
  if (Array.isArray(v)) return "[" + v.map(formatValue).join(",") + "]";
  if (typeof v === "object") {
    const o = v as Record<string, unknown>;
    if (Array.isArray(o.pair) && o.pair.length === 2)
      return "(" + formatValue(o.pair[0]) + "," + formatValue(o.pair[1]) + ")";
    if (typeof o.enum === "string") return o.enum;
    if (typeof o.text === "string") return o.text;
  }
  if (typeof v === "string") return JSON.stringify(v);
  return String(v);
}
