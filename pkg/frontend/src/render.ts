// Pure view: state in, HTML string out.  The DOM glue in main.ts only
// mounts this string and forwards clicks, so tests can assert on the
// exact rendering without a browser.

import { ViewState } from "./state.js";

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function render(s: ViewState): string {
  const parts: string[] = [];
  parts.push(`<header class="bar">`);
  parts.push(`<span class="title">${esc(s.processName ?? "…")}</span>`);
  parts.push(`<span class="conn conn-${s.connection}">${s.connection}</span>`);
  parts.push(`<button data-action="reset">reset</button>`);
  parts.push(`</header>`);

  if (s.connection === "closed") {
    parts.push(
      `<div class="banner banner-closed">Connection lost.` +
        ` <button data-action="reconnect">reconnect</button></div>`
    );
  }

  if (s.modal.kind === "manySteps") {
    parts.push(
      `<div class="modal modal-manySteps">Many steps (&gt; ${s.modal.count}); Continue?` +
        ` <button data-action="continue">Continue</button>` +
        ` <button data-action="end">End</button></div>`
    );
  } else if (s.modal.kind === "terminated") {
    parts.push(`<div class="banner banner-terminated">Terminated: ${esc(s.modal.text)}</div>`);
  } else if (s.modal.kind === "deadlocked") {
    parts.push(`<div class="banner banner-deadlocked">Deadlocked.</div>`);
  } else if (s.modal.kind === "ended") {
    parts.push(`<div class="banner banner-ended">Ended.</div>`);
  }

  if (s.stateNote !== null) {
    parts.push(`<div class="state-panel">State: <code>${esc(s.stateNote)}</code></div>`);
  }
  if (s.activity) {
    parts.push(`<div class="activity">Internal Activity...</div>`);
  }
  if (s.notice !== null) {
    parts.push(`<div class="notice">${esc(s.notice)}</div>`);
  }

  parts.push(`<div class="menu">`);
  s.menu.forEach((e, i) => {
    parts.push(`<button class="event" data-action="choose" data-idx="${i}">${esc(e.text)}</button>`);
  });
  parts.push(`</div>`);

  parts.push(`<ol class="trace">`);
  for (const t of s.trace) {
    parts.push(`<li>${esc(t)}</li>`);
  }
  parts.push(`</ol>`);
  return parts.join("\n");
}
