"""Random finite tree generation and reusable bounded law checks.

The generator produces small finite trees (bounded depth and branching)
used as a corpus for the algebraic law suites; the battery applies the
laws that mention a single process to an arbitrary tree, reporting a
three-valued verdict per law.
"""

from __future__ import annotations

import random
from typing import Callable, List, Sequence, Tuple

from .csp import extchoice, interleave
from .itree import (
    BisimVerdict,
    ITree,
    Ret,
    Sil,
    Vis,
    bind,
    div,
    skip,
    weak_bisim_to_depth,
    bisim_to_depth,
)
from .pfun import PFun
from .values import Event, VInt, Value


def default_events(n: int = 3) -> List[Event]:
    return [Event("ch", VInt(i)) for i in range(n)]


def random_itree(
    rng: random.Random,
    events: Sequence[Event],
    max_depth: int = 4,
    max_branch: int = 3,
) -> ITree:
    """A finite tree: Ret leaves with small values, some τs, small menus."""
    if max_depth <= 0:
        return Ret(VInt(rng.randrange(4)))
    roll = rng.random()
    if roll < 0.25:
        return Ret(VInt(rng.randrange(4)))
    if roll < 0.5:
        return Sil(random_itree(rng, events, max_depth - 1, max_branch))
    k = rng.randrange(0, min(max_branch, len(events)) + 1)
    chosen = rng.sample(list(events), k)
    return Vis(
        PFun.of(
            (e, random_itree(rng, events, max_depth - 1, max_branch)) for e in chosen
        )
    )


def random_ktree(
    rng: random.Random,
    events: Sequence[Event],
    max_depth: int = 3,
) -> Callable[[Value], ITree]:
    """A continuation choosing among a few pre-generated trees by value."""
    table = [random_itree(rng, events, max_depth) for _ in range(4)]

    def k(v):
        return table[abs(hash(v)) % len(table)]

    return k


def sample_values() -> List[Value]:
    return [VInt(i) for i in range(4)]


def unitize(p: ITree) -> ITree:
    """Discard return values so unit-process laws apply."""
    return bind(p, lambda _v: skip())


def law_battery(
    p: ITree, depth: int = 32, fuel: int = 1000, max_pairs: int = 20_000
) -> List[Tuple[str, BisimVerdict]]:
    """Single-process algebraic laws at bounded depth.

    Infinite-state processes typically come back unknown on the laws that
    need a full traversal; the structural ones (units, annihilators) close
    by node identity even then.
    """
    pu = unitize(p)
    kw = dict(depth=depth, fuel=fuel, max_pairs=max_pairs)
    checks = [
        ("bind right unit: p >>= ret  =  p", bisim_to_depth(bind(p, Ret), p, **kw)),
        ("tau absorption: tau p  ~  p", weak_bisim_to_depth(Sil(p), p, **kw)),
        ("choice unit: stop [] p  =  p", bisim_to_depth(extchoice(_stop(), p), p, **kw)),
        (
            "choice commutes with stop: p [] stop  =  stop [] p",
            bisim_to_depth(extchoice(p, _stop()), extchoice(_stop(), p), **kw),
        ),
        (
            "div annihilates choice: div [] p  ~  div",
            weak_bisim_to_depth(extchoice(div(), p), div(), **kw),
        ),
        (
            "skip unit for interleave: skip ||| p  ~  p   (p unitized)",
            weak_bisim_to_depth(interleave(skip(), pu), pu, **kw),
        ),
    ]
    return checks


def _stop() -> ITree:
    return Vis(PFun.empty())
