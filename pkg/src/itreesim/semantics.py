"""Operational and denotational views of a tree, bounded for checking.

The big-step relation skips τs; its tick-extended variant appends a
termination event carrying the returned value and moves to a deadlocked
successor.  Traces, failures, and divergences are enumerated to a trace
length and τ budget; refusal sets are kept symbolically as "everything
except this finite enabled set", since failures are subset-closed and far
too many to list.  Divergence is semi-decided: τ-cycles found by node
identity are definite, fuel exhaustion is a suspicion, and verdicts stay
three-valued.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union

from .itree import (
    B_TRUE,
    BisimVerdict,
    FuelExhausted,
    ITree,
    Ret,
    Sil,
    Vis,
    stabilises_within,
    stop,
    weak_bisim_to_depth,
)
from .values import Event, format_event, format_value, value_to_json, event_to_json


@dataclass(frozen=True)
class Tick:
    """Termination marker carrying the returned value; always trace-final."""

    value: object

    def __repr__(self) -> str:
        return f"✓({_fmt_ret(self.value)})"


TickEvent = Union[Event, Tick]


def _fmt_ret(v) -> str:
    try:
        return format_value(v)
    except TypeError:
        return repr(v)


def format_tick_event(x: TickEvent) -> str:
    return repr(x) if isinstance(x, Tick) else format_event(x)


def format_trace(tr: Iterable[TickEvent]) -> str:
    return "[" + ", ".join(format_tick_event(x) for x in tr) + "]"


def tick_event_to_json(x: TickEvent):
    if isinstance(x, Tick):
        try:
            return {"tick": value_to_json(x.value)}
        except TypeError:
            return {"tick": {"text": repr(x.value)}}
    return {"event": event_to_json(x)}


# ---------------------------------------------------------------------------
# exploration


def _tau_spine(t: ITree, fuel: int):
    """Forced nodes along the τ-spine and the stable end (None if divergent)."""
    nodes: List[ITree] = []
    seen: set = set()
    cur = t
    n = 0
    while True:
        node = cur.force()
        nodes.append(node)
        if not isinstance(node, Sil):
            return nodes, node
        if id(node) in seen or n >= fuel:
            return nodes, None
        seen.add(id(node))
        cur = node.child
        n += 1


@dataclass
class Exploration:
    pairs: List[Tuple[Tuple[Event, ...], ITree]]  # every derivable (trace, state)
    stable: dict  # trace -> stable node (unique: trees are deterministic)
    divergent: set  # traces whose τ-spine never stabilises within fuel
    truncated: bool  # True when max_len stopped the expansion somewhere


def explore(p: ITree, max_len: int, fuel: int) -> Exploration:
    pairs: List[Tuple[Tuple[Event, ...], ITree]] = []
    stable: dict = {}
    divergent: set = set()
    seen_pairs: set = set()
    truncated = False
    frontier: deque = deque([((), p)])
    while frontier:
        trace, t = frontier.popleft()
        if trace in stable or trace in divergent:
            continue
        nodes, end = _tau_spine(t, fuel)
        for nd in nodes:
            key = (trace, id(nd))
            if key not in seen_pairs:
                seen_pairs.add(key)
                pairs.append((trace, nd))
        if end is None:
            divergent.add(trace)
            continue
        stable[trace] = end
        if isinstance(end, Vis):
            if len(trace) < max_len:
                for e in end.choices:
                    frontier.append((trace + (e,), end.choices[e]))
            elif len(end.choices) > 0:
                truncated = True
    return Exploration(pairs, stable, divergent, truncated)


def steps(p: ITree, max_len: int, fuel: int = 1000) -> set:
    """All (trace, successor) pairs of the big-step relation, bounded.

    Successors are compared by identity inside the set; a divergent τ-run
    still contributes the states it passed through.
    """
    ex = explore(p, max_len, fuel)
    return {(tr, node) for tr, node in ex.pairs}


_STOP = stop()


def tick_steps(p: ITree, max_len: int, fuel: int = 1000) -> set:
    """Step relation over Σ✓: terminating runs gain a final tick to stop."""
    ex = explore(p, max_len, fuel)
    out = {(tr, node) for tr, node in ex.pairs}
    for tr, node in ex.stable.items():
        if isinstance(node, Ret):
            out.add((tr + (Tick(node.value),), _STOP))
    return out


def traces(p: ITree, max_len: int, fuel: int = 1000) -> set:
    """All bounded traces, tick-final ones included; prefix-closed."""
    return {tr for tr, _node in tick_steps(p, max_len, fuel)}


# ---------------------------------------------------------------------------
# refusals and failures


def refuses(p_stable: ITree, xs: Iterable[TickEvent]) -> bool:
    """Does this stable tree refuse every member of the set?"""
    node = p_stable.force()
    if isinstance(node, Sil):
        raise ValueError("refusals are defined on stable trees only")
    if isinstance(node, Vis):
        dom = node.choices.dom()
        return not any(x in dom for x in xs if isinstance(x, Event))
    return Tick(node.value) not in set(xs)


def enabled_of(node: ITree) -> frozenset:
    """The tick-events a stable node cannot refuse."""
    node = node.force()
    if isinstance(node, Vis):
        return frozenset(node.choices.dom())
    if isinstance(node, Ret):
        return frozenset({Tick(node.value)})
    raise ValueError("enabled set of an unstable tree")


@dataclass(frozen=True)
class FailureDesc:
    """The refusal family of one stable state: (trace, X) for every X
    disjoint from the enabled set."""

    trace: Tuple[TickEvent, ...]
    enabled: frozenset

    def admits(self, xs: Iterable[TickEvent]) -> bool:
        return not (set(xs) & self.enabled)

    def __repr__(self) -> str:
        en = "{" + ", ".join(sorted(format_tick_event(x) for x in self.enabled)) + "}"
        return f"({format_trace(self.trace)}, refuses all outside {en})"

    def to_record(self) -> dict:
        return {
            "kind": "failure",
            "trace": [tick_event_to_json(x) for x in self.trace],
            "refusal": "all-except-enabled",
            "enabled": [tick_event_to_json(x) for x in sorted(self.enabled, key=format_tick_event)],
        }


def failures_enum(p: ITree, max_len: int, fuel: int = 1000) -> List[FailureDesc]:
    """One refusal-family description per reachable stable state."""
    ex = explore(p, max_len, fuel)
    descs = []
    seen = set()
    for tr, node in sorted(ex.stable.items(), key=lambda kv: (len(kv[0]),)):
        d = FailureDesc(tr, enabled_of(node))
        if (d.trace, d.enabled) not in seen:
            seen.add((d.trace, d.enabled))
            descs.append(d)
        if isinstance(node, Ret):
            d2 = FailureDesc(tr + (Tick(node.value),), frozenset())
            if (d2.trace, d2.enabled) not in seen:
                seen.add((d2.trace, d2.enabled))
                descs.append(d2)
    return descs


def failure_check(
    p: ITree,
    trace: Tuple[TickEvent, ...],
    refused: Iterable[TickEvent],
    fuel: int = 1000,
) -> bool:
    """Is (trace, refused) a failure of p, within bounds?"""
    for d in failures_enum(p, max_len=len(trace), fuel=fuel):
        if d.trace == tuple(trace) and d.admits(refused):
            return True
    return False


# ---------------------------------------------------------------------------
# divergences


class Divergences:
    """Minimal divergence points; membership applies extension closure."""

    __slots__ = ("minimal",)

    def __init__(self, minimal: Iterable[Tuple[Event, ...]]):
        self.minimal = frozenset(tuple(m) for m in minimal)

    def __contains__(self, trace) -> bool:
        trace = tuple(trace)
        return any(trace[: len(m)] == m for m in self.minimal)

    def is_empty(self) -> bool:
        return not self.minimal

    def __eq__(self, other) -> bool:
        return isinstance(other, Divergences) and self.minimal == other.minimal

    def __hash__(self) -> int:
        return hash(self.minimal)

    def __repr__(self) -> str:
        if not self.minimal:
            return "{}"
        body = ", ".join(format_trace(m) + " + all extensions" for m in sorted(self.minimal, key=len))
        return "{" + body + "}"

    def to_records(self) -> List[dict]:
        return [
            {
                "kind": "divergence",
                "trace": [tick_event_to_json(x) for x in m],
                "extensions": "all",
            }
            for m in sorted(self.minimal, key=len)
        ]


def divergences(p: ITree, max_len: int, fuel: int = 1000) -> Divergences:
    ex = explore(p, max_len, fuel)
    return Divergences(ex.divergent)


def div_free(p: ITree, state_budget: int = 500, fuel: int = 1000) -> BisimVerdict:
    """Explore reachable states breadth-first; all must stabilise.

    True needs a closed frontier (node identity detects revisits), False
    carries a witness trace to a non-stabilising state, Unknown means the
    state budget ran out with work left.
    """
    seen: set = set()
    keep = []
    processed = 0
    frontier: deque = deque([((), p)])
    while frontier:
        trace, t = frontier.popleft()
        r = stabilises_within(t, fuel)
        if isinstance(r, FuelExhausted):
            marker = "proven τ-cycle" if r.cycle else f"no stable node within fuel {fuel}"
            return BisimVerdict(
                "false", path=tuple(format_event(e) for e in trace) + (marker,)
            )
        node = r.node
        if id(node) in seen:
            continue
        if processed >= state_budget:
            return BisimVerdict("unknown", reason="state budget exhausted with open frontier")
        seen.add(id(node))
        keep.append(node)
        processed += 1
        if isinstance(node, Vis):
            for e in node.choices:
                frontier.append((trace + (e,), node.choices[e]))
    return B_TRUE


# ---------------------------------------------------------------------------
# healthiness report


@dataclass
class HealthCheck:
    name: str
    status: str  # "pass" | "fail" | "unknown"
    detail: str = ""

    def to_record(self) -> dict:
        return {"kind": "health", "name": self.name, "status": self.status, "detail": self.detail}


@dataclass
class HealthReport:
    checks: List[HealthCheck]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            mark = {"pass": "PASS", "fail": "FAIL", "unknown": "UNKNOWN"}[c.status]
            lines.append(f"{mark:8s} {c.name}" + (f" — {c.detail}" if c.detail else ""))
        return "\n".join(lines)

    def to_records(self) -> List[dict]:
        return [c.to_record() for c in self.checks]


def healthiness_suite(
    p: ITree,
    max_len: int = 4,
    fuel: int = 1000,
    state_budget: int = 500,
    bisim_depth: int = 16,
) -> HealthReport:
    checks: List[HealthCheck] = []
    trs = traces(p, max_len + 1, fuel)
    descs = failures_enum(p, max_len, fuel)
    divs = divergences(p, max_len, fuel)

    # F3: an event a stable state cannot refuse must extend the trace set
    bad = [
        (d, x)
        for d in descs
        for x in d.enabled
        if d.trace + (x,) not in trs
    ]
    checks.append(
        HealthCheck(
            "F3 refusal closure",
            "pass" if not bad else "fail",
            "" if not bad else f"unrefusable event does not extend trace: {bad[0]}",
        )
    )

    # D1: divergences are extension-closed (holds by representation; spot-check)
    probe = Event("_d1_probe")
    d1_ok = all((m + (probe,)) in divs for m in divs.minimal)
    checks.append(HealthCheck("D1 extension closure", "pass" if d1_ok else "fail"))

    # weak bisimulation implies equal bounded failures and divergences (p vs τ^k p)
    wb_ok = True
    wb_detail = ""
    for k in (1, 3):
        q = p
        for _ in range(k):
            q = Sil(q)
        v = weak_bisim_to_depth(p, q, depth=bisim_depth, fuel=fuel)
        same_f = set(failures_enum(q, max_len, fuel)) == set(descs)
        same_d = divergences(q, max_len, fuel) == divs
        if not (v.passes and same_f and same_d):
            wb_ok = False
            wb_detail = f"τ^{k} variant differs (bisim={v!r}, failures equal={same_f}, divergences equal={same_d})"
            break
    checks.append(HealthCheck("weak bisimulation preserves failures/divergences", "pass" if wb_ok else "fail", wb_detail))

    # divergence freedom agrees with the enumerated divergence set
    df = div_free(p, state_budget=state_budget, fuel=fuel)
    if df.kind == "unknown":
        checks.append(HealthCheck("div-free ⟺ no divergences", "unknown", df.reason))
    else:
        agree = (df.kind == "true") == divs.is_empty()
        checks.append(
            HealthCheck(
                "div-free ⟺ no divergences",
                "pass" if agree else "fail",
                f"div_free={df.kind}, bounded divergences={divs!r}" if not agree else "",
            )
        )

    # a divergence-free process never refuses an event it can perform
    if df.kind == "true":
        viol = None
        stable_by_trace = {d.trace: d for d in descs}
        for tr in trs:
            if not tr or len(tr) - 1 > max_len:
                continue
            prefix, last = tr[:-1], tr[-1]
            d = stable_by_trace.get(prefix)
            if d is not None and last not in d.enabled:
                viol = (prefix, last)
                break
        checks.append(
            HealthCheck(
                "possible events are not refused",
                "pass" if viol is None else "fail",
                "" if viol is None else f"({format_trace(viol[0])}, {{{format_tick_event(viol[1])}}})",
            )
        )
    else:
        checks.append(HealthCheck("possible events are not refused", "unknown", "needs div-free"))

    return HealthReport(checks)
