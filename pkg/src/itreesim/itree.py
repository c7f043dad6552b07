"""Interaction trees: lazy Ret/Sil/Vis nodes with memoized forcing.

A tree is either a constructor node (Ret, Sil, Vis) or a Suspend holding a
deferred computation.  Forcing a Suspend computes and caches its
constructor node, so forcing the same suspension twice yields the
identical node; combinators exploit this by mapping cyclic inputs to
cyclic outputs (a closure-scoped memo keyed by forced-node identity),
which lets the τ-cycle detector prove divergence of `div`, `bind(div, k)`
and friends by pointer equality instead of burning fuel.

Tree equality is never structural recursion (it would not terminate);
use the bounded bisimulation checkers, which return three-valued verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Tuple, TypeVar, Union

import threading

from .pfun import PFun
from .values import UNIT, Event, format_event

R = TypeVar("R")
S = TypeVar("S")

_stats = {"forced": 0}
_FILL_LOCK = threading.Lock()  # guards first fill only; cached reads are lock-free


def forced_count() -> int:
    """Number of suspensions computed so far (test harness hook)."""
    return _stats["forced"]


class ITree:
    __slots__ = ()

    def force(self) -> "ITree":
        return self


class Ret(ITree):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"Ret({self.value!r})"


class Sil(ITree):
    __slots__ = ("child",)

    def __init__(self, child: ITree):
        self.child = child

    def __repr__(self):
        return "Sil(...)"


class Vis(ITree):
    __slots__ = ("choices",)

    def __init__(self, choices: PFun):
        self.choices = choices

    def __repr__(self):
        evs = ", ".join(format_event(e) for e in self.choices)
        return f"Vis[{evs}]"


class Suspend(ITree):
    __slots__ = ("_fn", "_node")

    def __init__(self, fn: Callable[[], ITree]):
        self._fn = fn
        self._node = None

    def force(self) -> ITree:
        node = self._node
        if node is None:
            _stats["forced"] += 1
            t = self._fn()
            node = t.force() if isinstance(t, Suspend) else t
            # idempotent fill: concurrent forcings may compute twice, but
            # exactly one result wins and every caller returns it
            with _FILL_LOCK:
                if self._node is None:
                    self._node = node
                    self._fn = None
            node = self._node
        return node


KTree = Callable[[R], ITree]


# ---------------------------------------------------------------------------
# constructors


def ret(v) -> ITree:
    return Ret(v)


def sil(t: ITree) -> ITree:
    return Sil(t)


def vis(choices) -> ITree:
    """Visible choice; accepts a PFun, dict, or iterable of (event, tree)."""
    if isinstance(choices, PFun):
        return Vis(choices)
    if isinstance(choices, dict):
        return Vis(PFun.of(choices.items()))
    return Vis(PFun.of(choices))


def stop() -> ITree:
    return Vis(PFun.empty())


def skip() -> ITree:
    return Ret(UNIT)


def suspend(fn: Callable[[], ITree]) -> ITree:
    return Suspend(fn)


_DIV = None


def div() -> ITree:
    """The unique τ-cycle: a Sil node whose child is itself."""
    global _DIV
    if _DIV is None:
        d = Sil.__new__(Sil)
        d.child = d
        _DIV = d
    return _DIV


def run(events: Iterable[Event]) -> ITree:
    """Offer every given event forever; run([]) deadlocks."""
    node = Vis.__new__(Vis)
    node.choices = PFun.of((e, node) for e in events)
    return node


# ---------------------------------------------------------------------------
# bind and composition


def bind(p: ITree, k: KTree) -> ITree:
    """Run p; feed each returned value to the continuation k.

    The memo maps forced nodes of p to their result tree, so shared or
    cyclic structure in p is preserved in the output.  Entries retain the
    keyed node: ids are only unique among live objects.
    """
    memo: dict = {}

    def go(src: ITree) -> ITree:
        out = Suspend(lambda: step(src, out))
        return out

    def step(src: ITree, self_s: Suspend) -> ITree:
        n = src.force()
        hit = memo.get(id(n))
        if hit is not None and hit[1] is not self_s:
            return hit[1]
        memo[id(n)] = (n, self_s)
        if isinstance(n, Ret):
            return k(n.value)
        if isinstance(n, Sil):
            return Sil(go(n.child))
        return Vis(n.choices.map_values(go))

    return go(p)


def kleisli(k1: KTree, k2: KTree) -> KTree:
    """Sequential composition of continuations."""
    return lambda x: bind(k1(x), k2)


def while_(b: Callable[[S], bool], body: Callable[[S], ITree]) -> Callable[[S], ITree]:
    """τ-guarded loop: iterate body while the condition holds on the state.

    The continuation is memoized per state value (when hashable), so a
    recurring state yields the identical node and τ-cycles are detectable.
    """
    memo: dict = {}

    def k(s):
        try:
            hit = memo.get(s)
        except TypeError:
            hit = None
        if hit is not None:
            return hit
        out = Suspend(lambda: Sil(bind(body(s), k)) if b(s) else Ret(s))
        try:
            memo[s] = out
        except TypeError:
            pass
        return out

    return k


def loop(body: Callable[[S], ITree]) -> Callable[[S], ITree]:
    return while_(lambda s: True, body)


def iter_(p: ITree) -> ITree:
    """Repeat p forever, discarding its results; iter_(skip()) diverges."""
    return loop(lambda _s: p)(UNIT)


# ---------------------------------------------------------------------------
# stabilisation


@dataclass(frozen=True)
class Stable:
    taus: int
    node: ITree


@dataclass(frozen=True)
class FuelExhausted:
    budget: int
    taus: int
    cycle: bool = False  # True when a τ-cycle was proven by node identity


StabResult = Union[Stable, FuelExhausted]


def stabilises_within(p: ITree, fuel: int) -> StabResult:
    """Peel τs until a stable node, a proven τ-cycle, or fuel runs out."""
    seen: set = set()
    keep = []  # hold nodes so ids stay unique
    t = p
    n = 0
    while True:
        node = t.force()
        if not isinstance(node, Sil):
            return Stable(n, node)
        if id(node) in seen:
            return FuelExhausted(fuel, n, cycle=True)
        if n >= fuel:
            return FuelExhausted(fuel, n, cycle=False)
        seen.add(id(node))
        keep.append(node)
        t = node.child
        n += 1


# ---------------------------------------------------------------------------
# bounded bisimulation


@dataclass(frozen=True)
class BisimVerdict:
    kind: str  # "true" | "false" | "unknown"
    path: Tuple[str, ...] = ()  # for false: distinguishing path + marker
    reason: str = ""  # for unknown

    @property
    def is_true(self) -> bool:
        return self.kind == "true"

    @property
    def refuted(self) -> bool:
        return self.kind == "false"

    @property
    def passes(self) -> bool:
        """Not refuted within the bound."""
        return self.kind != "false"

    def __repr__(self):
        if self.kind == "true":
            return "Bisim(True)"
        if self.kind == "false":
            return f"Bisim(False @ {list(self.path)})"
        return f"Bisim(Unknown: {self.reason})"


B_TRUE = BisimVerdict("true")


def _false(path, marker: str) -> BisimVerdict:
    return BisimVerdict("false", path=tuple(path) + (marker,))


def _unknown(reason: str) -> BisimVerdict:
    return BisimVerdict("unknown", reason=reason)


def _kind_name(n: ITree) -> str:
    return type(n).__name__


def bisim_to_depth(
    p: ITree, q: ITree, depth: int = 64, fuel: int = 1000, max_pairs: int = 200_000
) -> BisimVerdict:
    """Bounded strong bisimulation.

    Same constructor kind at every compared node, equal Ret values, Sil
    children related, Vis domains equal with all continuations related.
    Pairs already assumed on the candidate relation close coinductively,
    so cyclic trees get definitive verdicts.  `depth` bounds descent
    through visible events, `fuel` bounds consecutive τ pairs, and
    `max_pairs` caps total work (exceeding it is an unknown verdict, since
    wide menus make the pair space exponential in the depth).
    """
    assumed: dict = {}  # id pair -> node pair (kept alive so ids stay unique)

    def go(p, q, d, path) -> BisimVerdict:
        if len(assumed) > max_pairs:
            return _unknown("pair budget exhausted")
        taus = 0
        while True:
            pn, qn = p.force(), q.force()
            if pn is qn:
                return B_TRUE
            key = (id(pn), id(qn))
            if key in assumed:
                return B_TRUE
            if type(pn) is not type(qn):
                return _false(path, f"kind: {_kind_name(pn)} vs {_kind_name(qn)}")
            if isinstance(pn, Sil):
                if taus >= fuel:
                    return _unknown("tau fuel exhausted")
                assumed[key] = (pn, qn)
                p, q = pn.child, qn.child
                taus += 1
                continue
            break
        assumed[key] = (pn, qn)
        if isinstance(pn, Ret):
            if pn.value == qn.value:
                return B_TRUE
            return _false(path, f"return: {pn.value!r} vs {qn.value!r}")
        fd, gd = pn.choices.dom(), qn.choices.dom()
        if fd != gd:
            only_l = sorted(format_event(e) for e in fd - gd)
            only_r = sorted(format_event(e) for e in gd - fd)
            return _false(path, f"domain: left-only={only_l} right-only={only_r}")
        if d <= 0 and len(fd) > 0:
            return _unknown("depth bound reached")
        verdict = B_TRUE
        for e in pn.choices:
            sub = go(pn.choices[e], qn.choices[e], d - 1, path + (format_event(e),))
            if sub.refuted:
                return sub
            if sub.kind == "unknown":
                verdict = sub
        return verdict

    return go(p, q, depth, ())


def weak_bisim_to_depth(
    p: ITree, q: ITree, depth: int = 64, fuel: int = 1000, max_pairs: int = 200_000
) -> BisimVerdict:
    """Bounded weak bisimulation: τs are stripped before comparing.

    Both sides stabilise: stable shapes must match and continuations stay
    related.  Both sides fail to stabilise: related (div is only weakly
    bisimilar to div).  One side stabilises while the other has a proven
    τ-cycle: refuted; if the other side merely ran out of fuel: unknown.
    `max_pairs` caps total work as in bisim_to_depth.
    """
    assumed: dict = {}  # id pair -> node pair (kept alive so ids stay unique)

    def go(p, q, d, path) -> BisimVerdict:
        if len(assumed) > max_pairs:
            return _unknown("pair budget exhausted")
        rp = stabilises_within(p, fuel)
        rq = stabilises_within(q, fuel)
        p_stable = isinstance(rp, Stable)
        q_stable = isinstance(rq, Stable)
        if p_stable and q_stable:
            pn, qn = rp.node, rq.node
            if pn is qn:
                return B_TRUE
            key = (id(pn), id(qn))
            if key in assumed:
                return B_TRUE
            assumed[key] = (pn, qn)
            if type(pn) is not type(qn):
                return _false(path, f"kind: {_kind_name(pn)} vs {_kind_name(qn)}")
            if isinstance(pn, Ret):
                if pn.value == qn.value:
                    return B_TRUE
                return _false(path, f"return: {pn.value!r} vs {qn.value!r}")
            fd, gd = pn.choices.dom(), qn.choices.dom()
            if fd != gd:
                only_l = sorted(format_event(e) for e in fd - gd)
                only_r = sorted(format_event(e) for e in gd - fd)
                return _false(path, f"domain: left-only={only_l} right-only={only_r}")
            if d <= 0 and len(fd) > 0:
                return _unknown("depth bound reached")
            verdict = B_TRUE
            for e in pn.choices:
                sub = go(pn.choices[e], qn.choices[e], d - 1, path + (format_event(e),))
                if sub.refuted:
                    return sub
                if sub.kind == "unknown":
                    verdict = sub
            return verdict
        if not p_stable and not q_stable:
            return B_TRUE
        divergent = rq if p_stable else rp
        if divergent.cycle:
            side = "right" if p_stable else "left"
            return _false(path, f"divergence: {side} side has a τ-cycle, other is stable")
        return _unknown("tau fuel exhausted on one side")

    return go(p, q, depth, ())
