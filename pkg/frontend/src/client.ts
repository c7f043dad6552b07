// Session client: folds inbound frames into the view state and guards
// outbound choices.  Transport is abstract so tests can plug in any
// socket implementation (browser WebSocket, node ws, or a fake).

import { ClientFrame, EventInfo, ServerFrame, parseServerFrame } from "./protocol.js";
import {
  ViewState,
  canChoose,
  initialState,
  reduce,
  resetView,
  setConnection,
} from "./state.js";

export interface Transport {
  send(data: string): void;
}

export class SimClient {
  state: ViewState = initialState();
  frameLog: ServerFrame[] = [];
  private transport: Transport | null = null;

  constructor(private onChange: (s: ViewState) => void = () => {}) {}

  attach(t: Transport): void {
    this.transport = t;
    this.update(setConnection(this.state, "open"));
  }

  detach(): void {
    this.transport = null;
    this.update(setConnection(this.state, "closed"));
  }

  handleRaw(raw: string): void {
    const frame = parseServerFrame(raw);
    if (frame === null) return; // unknown frames are ignored, not fatal
    this.frameLog.push(frame);
    this.update(reduce(this.state, frame));
  }

  /** Send a choice; refuses events that are not on the latest menu. */
  chooseEvent(e: EventInfo): boolean {
    if (!canChoose(this.state, e)) return false;
    this.send({ type: "choose", event: { channel: e.channel, value: e.value, text: e.text } });
    return true;
  }

  chooseIndex(i: number): boolean {
    const e = this.state.menu[i];
    if (e === undefined) return false;
    return this.chooseEvent(e);
  }

  sendContinue(): void {
    this.send({ type: "continue" });
  }

  sendEnd(): void {
    this.send({ type: "end" });
  }

  sendReset(): void {
    this.update(resetView(this.state));
    this.frameLog = [];
    this.send({ type: "reset" });
  }

  private send(f: ClientFrame): void {
    this.transport?.send(JSON.stringify(f));
  }

  private update(s: ViewState): void {
    this.state = s;
    this.onChange(s);
  }
}
