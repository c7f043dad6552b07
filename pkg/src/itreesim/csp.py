"""Deterministic CSP operators over interaction trees.

Communication primitives build finite menus from channel prisms; external
choice, generalized parallel, and hiding follow priority-ordered equations
with maximal progress (τ first).  Nondeterminism is excluded by
construction: clashing events are dropped (choice), blocked (parallel), or
deadlock (hiding several enabled hidden events at once).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from .itree import ITree, Ret, Sil, Suspend, Vis, bind, skip, stop
from .optics import ChanDecl, prism_of
from .pfun import PFun
from .values import EMPTY_EVENTS, UNIT, EventSet, Value, format_event

logger = logging.getLogger(__name__)


class ChannelError(Exception):
    """Bad communication: no enumerable domain or payload mismatch."""


def inp(c: ChanDecl, domain: Optional[Iterable[Value]] = None) -> ITree:
    """Offer every event of channel c whose payload lies in the domain.

    The domain is the explicit argument (intersected with the channel's
    declared domain, when any) or else the channel's declared finite
    domain.  Selecting c.v returns v.
    """
    if domain is None:
        if c.enum_domain is None:
            raise ChannelError(
                f"input on {c.name} needs a finite domain: the channel does not "
                "declare one and none was given"
            )
        values = list(c.enum_domain)
    else:
        values = [v for v in domain if c.payload_kind.matches(v)]
        if c.enum_domain is not None:
            declared = set(c.enum_domain)
            values = [v for v in values if v in declared]
    seen = set()
    entries = []
    prism = prism_of(c)
    for v in values:
        if v in seen:
            continue
        seen.add(v)
        entries.append((prism.build(v), Ret(v)))
    return Vis(PFun.of(entries))


def outp(c: ChanDecl, v: Value) -> ITree:
    """Emit one event, then terminate with ()."""
    e = prism_of(c).build(v)
    return Vis(PFun.singleton(e, skip()))


def sync(c: ChanDecl) -> ITree:
    return outp(c, UNIT)


def guard(b: bool) -> ITree:
    return skip() if b else stop()


# ---------------------------------------------------------------------------
# external choice


def extchoice(p: ITree, q: ITree) -> ITree:
    """Environment-resolved choice; common initial events are excluded.

    Priority order: τ on either side is consumed first (left before
    right), returns beat visible events, and two returns agree or
    deadlock.
    """
    memo: dict = {}

    def go(p: ITree, q: ITree) -> ITree:
        out = Suspend(lambda: step(p, q, out))
        return out

    def step(p: ITree, q: ITree, self_s: Suspend) -> ITree:
        pn, qn = p.force(), q.force()
        key = (id(pn), id(qn))
        hit = memo.get(key)
        if hit is not None and hit[2] is not self_s:
            return hit[2]
        memo[key] = (pn, qn, self_s)  # retain nodes so ids stay unique
        if isinstance(pn, Sil):
            return Sil(go(pn.child, qn))
        if isinstance(qn, Sil):
            return Sil(go(pn, qn.child))
        if isinstance(pn, Ret) and isinstance(qn, Ret):
            return pn if pn.value == qn.value else stop()
        if isinstance(pn, Ret):
            return pn
        if isinstance(qn, Ret):
            return qn
        return Vis(pn.choices.merge_excl(qn.choices))

    return go(p, q)


# ---------------------------------------------------------------------------
# parallel composition


@dataclass(frozen=True)
class Left:
    tree: ITree


@dataclass(frozen=True)
class Right:
    tree: ITree


@dataclass(frozen=True)
class Both:
    left: ITree
    right: ITree


def merge_fn(sync_set: EventSet, f: PFun, g: PFun) -> PFun:
    """Tag each event by which parallel branch it advances.

    Independent events must be enabled on exactly one side and lie outside
    the synchronization set; synchronized events need both sides.
    """
    fd, gd = f.dom(), g.dom()
    entries = []
    for e, cont in f.items():
        if e not in gd and e not in sync_set:
            entries.append((e, Left(cont)))
    for e, cont in g.items():
        if e not in fd and e not in sync_set:
            entries.append((e, Right(cont)))
    for e, cont in f.items():
        if e in sync_set and e in gd:
            entries.append((e, Both(cont, g[e])))
    return PFun.of(entries)


def gpar(p: ITree, sync_set: EventSet, q: ITree) -> ITree:
    """Generalized parallel: synchronize on the given set, else interleave.

    Returns pair up: Ret x ∥ Ret y = Ret (x, y); a lone return is pushed
    through until the other side terminates.
    """
    memo: dict = {}

    def go(p: ITree, q: ITree) -> ITree:
        out = Suspend(lambda: step(p, q, out))
        return out

    def step(p: ITree, q: ITree, self_s: Suspend) -> ITree:
        pn, qn = p.force(), q.force()
        key = (id(pn), id(qn))
        hit = memo.get(key)
        if hit is not None and hit[2] is not self_s:
            return hit[2]
        memo[key] = (pn, qn, self_s)  # retain nodes so ids stay unique
        if isinstance(pn, Sil):
            return Sil(go(pn.child, qn))
        if isinstance(qn, Sil):
            return Sil(go(pn, qn.child))
        if isinstance(pn, Ret) and isinstance(qn, Ret):
            return Ret((pn.value, qn.value))
        if isinstance(pn, Ret):
            return Vis(qn.choices.map_values(lambda cont: go(pn, cont)))
        if isinstance(qn, Ret):
            return Vis(pn.choices.map_values(lambda cont: go(cont, qn)))
        merged = merge_fn(sync_set, pn.choices, qn.choices)
        entries = []
        for e, tag in merged.items():
            if isinstance(tag, Left):
                entries.append((e, go(tag.tree, qn)))
            elif isinstance(tag, Right):
                entries.append((e, go(pn, tag.tree)))
            else:
                entries.append((e, go(tag.left, tag.right)))
        return Vis(PFun.of(entries))

    return go(p, q)


def cpar(p: ITree, sync_set: EventSet, q: ITree) -> ITree:
    """CSP parallel over unit processes: run gpar, discard the pair."""
    return bind(gpar(p, sync_set, q), lambda _xy: skip())


def interleave(p: ITree, q: ITree) -> ITree:
    return cpar(p, EMPTY_EVENTS, q)


# ---------------------------------------------------------------------------
# hiding


def hide(p: ITree, hidden: EventSet) -> ITree:
    """Internalize hidden events one at a time (maximal progress).

    Exactly one hidden event enabled: take it as a τ.  None: keep the menu
    and hide inside the continuations.  Two or more: deadlock (logged),
    since choosing silently would introduce nondeterminism.
    """
    memo: dict = {}

    def go(t: ITree) -> ITree:
        out = Suspend(lambda: step(t, out))
        return out

    def step(t: ITree, self_s: Suspend) -> ITree:
        n = t.force()
        hit = memo.get(id(n))
        if hit is not None and hit[1] is not self_s:
            return hit[1]
        memo[id(n)] = (n, self_s)  # retain the node so ids stay unique
        if isinstance(n, Ret):
            return n
        if isinstance(n, Sil):
            return Sil(go(n.child))
        enabled_hidden = [e for e in n.choices if e in hidden]
        if len(enabled_hidden) == 1:
            return Sil(go(n.choices[enabled_hidden[0]]))
        if not enabled_hidden:
            return Vis(n.choices.map_values(go))
        logger.info(
            "hiding deadlock: %d hidden events enabled simultaneously: %s",
            len(enabled_hidden),
            ", ".join(format_event(e) for e in enabled_hidden),
        )
        return stop()

    return go(p)
