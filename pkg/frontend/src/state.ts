// The view is a pure fold over the inbound frame stream: replaying a
// recorded log always rebuilds the identical state.  No semantics here,
// only bookkeeping of what the server said.

import { EventInfo, ServerFrame, formatValue, sameEvent } from "./protocol.js";

export type Modal =
  | { kind: "none" }
  | { kind: "manySteps"; count: number }
  | { kind: "terminated"; text: string }
  | { kind: "deadlocked" }
  | { kind: "ended" };

export interface ViewState {
  connection: "connecting" | "open" | "closed";
  processName: string | null;
  protocol: number | null;
  menu: EventInfo[];
  trace: string[]; // accepted event texts, chronological
  stateNote: string | null;
  notice: string | null; // inline rejection notice; menu stays put
  activity: boolean; // internal steps since the last interaction
  modal: Modal;
}

export function initialState(): ViewState {
  return {
    connection: "connecting",
    processName: null,
    protocol: null,
    menu: [],
    trace: [],
    stateNote: null,
    notice: null,
    activity: false,
    modal: { kind: "none" },
  };
}

export function reduce(s: ViewState, f: ServerFrame): ViewState {
  switch (f.type) {
    case "hello":
      return { ...s, processName: f.process, protocol: f.protocol };
    case "menu":
      return { ...s, menu: f.events, notice: null, modal: { kind: "none" } };
    case "stateNote":
      return { ...s, stateNote: f.text };
    case "activity":
      return { ...s, activity: true };
    case "accepted":
      return { ...s, trace: [...s.trace, f.event.text], notice: null, activity: false };
    case "rejected":
      return { ...s, notice: rejectionText(f.reason) };
    case "manySteps":
      return { ...s, modal: { kind: "manySteps", count: f.count } };
    case "terminated":
      return { ...s, menu: [], modal: { kind: "terminated", text: formatValue(f.value) } };
    case "deadlocked":
      return { ...s, menu: [], modal: { kind: "deadlocked" } };
    case "ended":
      return { ...s, menu: [], modal: { kind: "ended" } };
  }
}

function rejectionText(reason: string): string {
  return reason ? `Rejected: ${reason}` : "Rejected";
}

export function applyFrames(s: ViewState, frames: ServerFrame[]): ViewState {
  return frames.reduce(reduce, s);
}

export function setConnection(s: ViewState, c: ViewState["connection"]): ViewState {
  return { ...s, connection: c };
}

export function resetView(s: ViewState): ViewState {
  return {
    ...initialState(),
    connection: s.connection,
    processName: s.processName,
    protocol: s.protocol,
  };
}

/** Guard: only events on the latest menu may be chosen. */
export function canChoose(s: ViewState, e: EventInfo): boolean {
  return s.modal.kind === "none" && s.menu.some((m) => sameEvent(m, e));
}
