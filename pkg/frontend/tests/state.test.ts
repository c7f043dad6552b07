import { describe, expect, it } from "vitest";

import { EventInfo, ServerFrame } from "../src/protocol.js";
import { SimClient } from "../src/client.js";
import { applyFrames, canChoose, initialState, reduce } from "../src/state.js";

const ev = (channel: string, value: unknown, text: string): EventInfo => ({
  channel,
  value,
  text,
});

const I1 = ev("Input", 1, "Input.1");
const I2 = ev("Input", 2, "Input.2");
const MENU: ServerFrame = { type: "menu", events: [I1, I2] };

describe("reducer", () => {
  it("tracks hello and menus", () => {
    let s = initialState();
    s = reduce(s, { type: "hello", protocol: 1, process: "buffer" });
    s = reduce(s, MENU);
    expect(s.processName).toBe("buffer");
    expect(s.menu.map((e) => e.text)).toEqual(["Input.1", "Input.2"]);
  });

  it("accepted events append to the trace and clear notices", () => {
    let s = applyFrames(initialState(), [
      MENU,
      { type: "rejected", input: null, reason: "" },
    ]);
    expect(s.notice).toBe("Rejected");
    s = reduce(s, { type: "accepted", event: I1 });
    expect(s.trace).toEqual(["Input.1"]);
    expect(s.notice).toBeNull();
  });

  it("rejection keeps the menu", () => {
    let s = applyFrames(initialState(), [MENU, { type: "rejected", input: 9, reason: "" }]);
    expect(s.menu.length).toBe(2);
    expect(s.notice).toBe("Rejected");
  });

  it("modals: manySteps, terminated, deadlocked, ended", () => {
    const base = applyFrames(initialState(), [MENU]);
    expect(reduce(base, { type: "manySteps", count: 20 }).modal).toEqual({
      kind: "manySteps",
      count: 20,
    });
    expect(reduce(base, { type: "terminated", value: null }).modal).toEqual({
      kind: "terminated",
      text: "()",
    });
    expect(reduce(base, { type: "deadlocked" }).modal).toEqual({ kind: "deadlocked" });
    expect(reduce(base, { type: "ended" }).modal).toEqual({ kind: "ended" });
  });

  it("state notes and activity surface in the state", () => {
    const s = applyFrames(initialState(), [
      { type: "stateNote", text: "{buf: [1]}" },
      { type: "activity" },
    ]);
    expect(s.stateNote).toBe("{buf: [1]}");
    expect(s.activity).toBe(true);
  });
});

describe("choose guard", () => {
  it("only events on the latest menu can be chosen", () => {
    const s = applyFrames(initialState(), [MENU]);
    expect(canChoose(s, I1)).toBe(true);
    expect(canChoose(s, ev("Output", 1, "Output.1"))).toBe(false);
  });

  it("the client refuses to send ungrounded chooses", () => {
    const sent: string[] = [];
    const client = new SimClient();
    client.attach({ send: (d) => sent.push(d) });
    client.handleRaw(JSON.stringify(MENU));
    expect(client.chooseEvent(ev("Output", 7, "Output.7"))).toBe(false);
    expect(sent).toEqual([]);
    expect(client.chooseEvent(I1)).toBe(true);
    expect(sent.length).toBe(1);
    expect(JSON.parse(sent[0]!)).toEqual({
      type: "choose",
      event: { channel: "Input", value: 1, text: "Input.1" },
    });
  });

  it("no choosing through a modal", () => {
    const client = new SimClient();
    client.attach({ send: () => {} });
    client.handleRaw(JSON.stringify(MENU));
    client.handleRaw(JSON.stringify({ type: "manySteps", count: 20 }));
    expect(client.chooseEvent(I1)).toBe(false);
  });

  it("unparseable frames are ignored", () => {
    const client = new SimClient();
    client.attach({ send: () => {} });
    client.handleRaw("not json at all");
    client.handleRaw(JSON.stringify({ type: "mystery" }));
    expect(client.state.menu).toEqual([]);
    expect(client.frameLog.length).toBe(0);
  });
});
