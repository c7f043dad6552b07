"""Terminal front end: simulate, check, enumerate, serve.

The interactive loop prints the enabled-events line, prompts, and handles
rejections exactly like the counting simulator: unknown events answer
"Rejected", unparseable input answers "No parse", and both re-display the
menu.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from ..lang import ElabError, ParseError, load_file, parse_event, parse_value
from ..laws import law_battery
from ..semantics import (
    divergences,
    failures_enum,
    format_trace,
    healthiness_suite,
    tick_event_to_json,
    traces,
)
from ..values import format_event, format_value
from .session import (
    Accepted,
    Activity,
    Deadlocked,
    Ended,
    ManySteps,
    Menu,
    Rejected,
    SimConfig,
    StateNote,
    Terminated,
    choose,
    continue_,
    start_session,
)


def _load_target(path: str, proc: str, inits: Optional[List[str]]):
    table = load_file(path)
    args = [parse_value(v) for v in (inits or [])]
    return table, table.instantiate(proc, args)


def _print_msgs(msgs, config: SimConfig, out) -> str:
    """Render messages; returns the prompt kind now expected ('', 'menu', 'continue')."""
    mode = ""
    for m in msgs:
        if isinstance(m, Activity):
            out.write("Internal Activity...\n")
        elif isinstance(m, StateNote):
            out.write(f"State: {m.text}\n")
        elif isinstance(m, Menu):
            events = [format_event(e) for e in m.events]
            if config.max_menu is not None and len(events) > config.max_menu:
                shown = events[: config.max_menu]
                extra = len(events) - config.max_menu
                out.write("Events: [" + ", ".join(shown) + f", ... (+{extra} more)]\n")
            else:
                out.write("Events: [" + ", ".join(events) + "]\n")
            mode = "menu"
        elif isinstance(m, ManySteps):
            mode = "continue"
        elif isinstance(m, Terminated):
            out.write(f"Terminated: {_fmt(m.value)}\n")
        elif isinstance(m, Deadlocked):
            out.write("Deadlocked.\n")
        elif isinstance(m, Rejected):
            out.write("Rejected\n")
        elif isinstance(m, Ended):
            out.write("Ended.\n")
        elif isinstance(m, Accepted):
            pass
    return mode


def _fmt(v) -> str:
    try:
        return format_value(v)
    except TypeError:
        return repr(v)


def cmd_sim(args) -> int:
    _table, target = _load_target(args.file, args.process, args.init)
    config = SimConfig(
        tau_prompt_threshold=args.tau_limit,
        max_menu=args.max_menu,
        max_depth=args.max_depth,
    )
    out = sys.stdout
    session, msgs = start_session(target, config)
    mode = _print_msgs(msgs, config, out)
    while session.running:
        if mode == "continue":
            out.write(f"Many steps (> {config.tau_prompt_threshold}); Continue? ")
            out.flush()
            line = sys.stdin.readline()
            if not line:
                return 0
            session, msgs = continue_(session, line.strip() in ("Y", "y"))
            mode = _print_msgs(msgs, config, out)
            continue
        out.write("> ")
        out.flush()
        line = sys.stdin.readline()
        if not line:
            return 0
        text = line.strip()
        if not text:
            continue
        pick = _parse_choice(text)
        if pick is None:
            out.write("No parse\n")
            session, msgs = _redisplay(session)
            mode = _print_msgs(msgs, config, out)
            continue
        session, msgs = choose(session, pick)
        mode = _print_msgs(msgs, config, out)
        if any(isinstance(m, Rejected) for m in msgs):
            session, msgs = _redisplay(session)
            mode = _print_msgs(msgs, config, out)
    return 0


def _parse_choice(text: str):
    if text.lstrip("-").isdigit():
        return int(text)
    try:
        return parse_event(text)
    except ParseError:
        return None


def _redisplay(session):
    if session.status == "menu":
        return session, [Menu(session.menu)]
    return session, []


def cmd_check(args) -> int:
    _table, target = _load_target(args.file, args.process, args.init)
    if args.what == "laws":
        results = law_battery(target.tree, depth=args.depth, fuel=args.fuel)
        failed = any(v.refuted for _n, v in results)
        if args.format == "json":
            for name, verdict in results:
                print(json.dumps({"kind": "law", "name": name, "status": verdict.kind,
                                  "path": list(verdict.path), "reason": verdict.reason},
                                 sort_keys=True))
            return 1 if failed else 0
        for name, verdict in results:
            status = {"true": "PASS", "false": "FAIL", "unknown": "UNKNOWN"}[verdict.kind]
            detail = ""
            if verdict.kind == "false":
                detail = " @ " + " ".join(verdict.path)
            elif verdict.kind == "unknown":
                detail = f" ({verdict.reason})"
            print(f"{status:8s} {name}{detail}")
        return 1 if failed else 0
    report = healthiness_suite(target.tree, max_len=args.len, fuel=args.fuel)
    if args.format == "json":
        for r in report.to_records():
            print(json.dumps(r, sort_keys=True))
    else:
        print(report.to_text())
    return 0 if report.ok else 1


def cmd_enum(args) -> int:
    _table, target = _load_target(args.file, args.process, args.init)
    tree = target.tree
    records = []
    if args.what == "traces":
        for tr in sorted(traces(tree, args.len, args.fuel), key=lambda t: (len(t), format_trace(t))):
            records.append({"kind": "trace", "trace": [tick_event_to_json(x) for x in tr]})
            if args.format == "text":
                print(format_trace(tr))
    elif args.what == "failures":
        for d in failures_enum(tree, args.len, args.fuel):
            records.append(d.to_record())
            if args.format == "text":
                print(repr(d))
    else:
        divs = divergences(tree, args.len, args.fuel)
        records = divs.to_records()
        if args.format == "text":
            if divs.is_empty():
                print("no divergences within bounds")
            else:
                for m in sorted(divs.minimal, key=len):
                    print(format_trace(m) + " + all extensions")
    if args.format == "json":
        for r in records:
            print(json.dumps(r, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    _table, target = _load_target(args.file, args.process, args.init)
    app = create_app(target, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="itreesim",
        description="Simulate and analyze processes defined in .itp files.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help=".itp source file")
        p.add_argument("process", help="process name to instantiate")
        p.add_argument(
            "--init",
            action="append",
            help="argument value for the process (repeat per parameter)",
        )
        p.add_argument("--fuel", type=int, default=1000, help="τ budget per step")

    sim = sub.add_parser("sim", help="interactive simulation on the terminal")
    common(sim)
    sim.add_argument("--tau-limit", type=int, default=20, help="τ steps before asking to continue")
    sim.add_argument("--max-depth", type=int, default=None, help="end the session after N events")
    sim.add_argument("--max-menu", type=int, default=None, help="events shown per menu line")
    sim.set_defaults(fn=cmd_sim)

    chk = sub.add_parser("check", help="run law or healthiness checks")
    chk.add_argument("what", choices=["laws", "health"])
    common(chk)
    chk.add_argument("--depth", type=int, default=32, help="bisimulation depth for laws")
    chk.add_argument("--len", type=int, default=4, help="trace length bound for health")
    chk.add_argument("--format", choices=["text", "json"], default="text")
    chk.set_defaults(fn=cmd_check)

    en = sub.add_parser("enum", help="enumerate traces, failures, or divergences")
    en.add_argument("what", choices=["traces", "failures", "divergences"])
    common(en)
    en.add_argument("--len", type=int, default=3, help="trace length bound")
    en.add_argument("--format", choices=["text", "json"], default="text")
    en.set_defaults(fn=cmd_enum)

    srv = sub.add_parser("serve", help="WebSocket session server (plus static UI)")
    common(srv)
    srv.add_argument("--port", type=int, default=8700)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    srv.set_defaults(fn=cmd_serve)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ElabError) as e:
        print(str(e), file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"no such file: {e.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
