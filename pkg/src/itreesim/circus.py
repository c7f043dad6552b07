"""State-rich actions: CSP lifted to homogeneous continuations over a state.

A Circus action maps a state record to an interaction tree whose returns
are updated state records.  Assignments apply substitutions, prefixes
thread the state through communication, and the name-set parallel runs two
actions on the same initial state and merges their finals through
independent lens regions.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from .csp import extchoice, gpar, guard, inp, outp
from .itree import ITree, Ret, bind, while_
from .optics import (
    Expr,
    Lens,
    SchemaError,
    StateSchema,
    StateSpace,
    Subst,
    lens_indep,
    lens_override,
)
from .values import TRUE, UNIT, EventSet, Value
from .optics import ChanDecl


class CircusAction:
    """A continuation over state records, with the schema it assumes."""

    __slots__ = ("fn", "schema")

    def __init__(self, fn: Callable[[StateSpace], ITree], schema: Optional[StateSchema] = None):
        self.fn = fn
        self.schema = schema

    def __call__(self, s: StateSpace) -> ITree:
        if self.schema is not None and s.schema != self.schema:
            raise SchemaError(f"action over {self.schema!r} applied to {s.schema!r}")
        return self.fn(s)


def _schema_of(*actions: CircusAction) -> Optional[StateSchema]:
    schemas = {a.schema for a in actions if a.schema is not None}
    if len(schemas) > 1:
        raise SchemaError("actions assume different schemas")
    return schemas.pop() if schemas else None


def assigns(sigma, schema: Optional[StateSchema] = None) -> CircusAction:
    """Lift a state-to-state function (or Subst) to an action."""
    return CircusAction(lambda s: Ret(sigma(s)), schema)


def assign(x: Lens, e: Expr, schema: Optional[StateSchema] = None) -> CircusAction:
    return assigns(Subst([(x, e)]), schema)


def cskip(schema: Optional[StateSchema] = None) -> CircusAction:
    return CircusAction(lambda s: Ret(s), schema)


def input_prefix(
    c: ChanDecl,
    domain: Optional[Iterable[Value]],
    body: Callable[[Value], CircusAction],
    schema: Optional[StateSchema] = None,
) -> CircusAction:
    """c?x:A -> body(x); the state is threaded unchanged into the body."""
    menu = inp(c, domain)
    return CircusAction(lambda s: bind(menu, lambda x: body(x)(s)), schema)


def output_prefix(c: ChanDecl, e: Expr, after: CircusAction) -> CircusAction:
    """c!e -> after; the payload is e evaluated in the current state."""
    return CircusAction(
        lambda s: bind(outp(c, e.eval(s)), lambda _x: after(s)),
        after.schema,
    )


def cextchoice(p: CircusAction, q: CircusAction) -> CircusAction:
    schema = _schema_of(p, q)
    return CircusAction(lambda s: extchoice(p(s), q(s)), schema)


def cguard(b: Expr, p: CircusAction) -> CircusAction:
    return CircusAction(lambda s: bind(guard(b.eval(s) == TRUE), lambda _x: p(s)), p.schema)


def cseq(p: CircusAction, q: CircusAction) -> CircusAction:
    schema = _schema_of(p, q)
    return CircusAction(lambda s: bind(p(s), q), schema)


def cwhile(b: Expr, body: CircusAction) -> CircusAction:
    k = while_(lambda s: b.eval(s) == TRUE, body)
    return CircusAction(k, body.schema)


def cloop(body: CircusAction) -> CircusAction:
    k = while_(lambda s: True, body)
    return CircusAction(k, body.schema)


def circus_par(
    p: CircusAction,
    ns1: Lens,
    sync_set: EventSet,
    ns2: Lens,
    q: CircusAction,
) -> CircusAction:
    """Name-set parallel: p owns ns1, q owns ns2, the rest stays put."""
    if not lens_indep(ns1, ns2):
        raise SchemaError(
            f"name sets must be independent: {sorted(ns1.footprint)} vs {sorted(ns2.footprint)}"
        )
    schema = _schema_of(p, q)

    def fn(s: StateSpace) -> ITree:
        def merge(pair):
            s1, s2 = pair
            return Ret(lens_override(lens_override(s, s1, ns1), s2, ns2))

        return bind(gpar(p(s), sync_set, q(s)), merge)

    return CircusAction(fn, schema)


def lift_tree(t: ITree, schema: Optional[StateSchema] = None) -> CircusAction:
    """Run a state-free tree inside an action; the state passes through."""
    return CircusAction(lambda s: bind(t, lambda _x: Ret(s)), schema)


def encapsulate(action: CircusAction, init: StateSpace) -> ITree:
    """Close an action over its initial state; the final state is dropped."""
    return bind(action(init), lambda _s: Ret(UNIT))
