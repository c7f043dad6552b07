// Browser entry: connect, render into #app, forward clicks.

import { SimClient } from "./client.js";
import { render } from "./render.js";

const app = document.getElementById("app")!;

const client = new SimClient((state) => {
  app.innerHTML = render(state);
});

let socket: WebSocket | null = null;

function connect(): void {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  socket = new WebSocket(`${proto}://${location.host}/ws`);
  socket.onopen = () => client.attach({ send: (d) => socket?.send(d) });
  socket.onmessage = (ev) => client.handleRaw(String(ev.data));
  socket.onclose = () => client.detach();
  socket.onerror = () => socket?.close();
}

app.addEventListener("click", (ev) => {
  const el = (ev.target as HTMLElement).closest("[data-action]");
  if (!(el instanceof HTMLElement)) return;
  switch (el.dataset.action) {
    case "choose":
      client.chooseIndex(Number(el.dataset.idx));
      break;
    case "continue":
      client.sendContinue();
      break;
    case "end":
      client.sendEnd();
      break;
    case "reset":
      client.sendReset();
      break;
    case "reconnect":
      connect();
      break;
  }
});

connect();
