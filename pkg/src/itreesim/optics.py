"""Channel declarations, prisms, state schemas, lenses, and substitutions.

Channels are declared with a payload shape (and optionally a finite value
domain); a prism mediates between payload values and events of that
channel.  State spaces are named-field records over a fixed schema; each
state variable is a lens, and substitutions apply several lens updates
simultaneously (all right-hand sides read the pre-state).

Independence and unrestriction are decided on declared footprints, which
keeps the side-conditions of the state-rich laws checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Tuple

from .values import (
    UNIT,
    Event,
    VBool,
    VEnum,
    VInt,
    VList,
    VPair,
    VStr,
    VUnit,
    Value,
    format_value,
)


class SchemaError(Exception):
    """Undeclared field, wrong schema, or payload type mismatch."""


# ---------------------------------------------------------------------------
# payload shapes


@dataclass(frozen=True)
class VType:
    kind: str
    args: tuple = ()

    def matches(self, v: Value) -> bool:
        k = self.kind
        if k == "unit":
            return isinstance(v, VUnit)
        if k == "bool":
            return isinstance(v, VBool)
        if k == "int":
            return isinstance(v, VInt)
        if k == "str":
            return isinstance(v, VStr)
        if k == "list":
            return isinstance(v, VList) and all(self.args[0].matches(x) for x in v.items)
        if k == "pair":
            return (
                isinstance(v, VPair)
                and self.args[0].matches(v.fst)
                and self.args[1].matches(v.snd)
            )
        if k == "enum":
            return isinstance(v, VEnum) and v.tag in self.args
        raise ValueError(f"unknown type kind {k!r}")

    def __repr__(self) -> str:
        if self.kind == "list":
            return f"{self.args[0]!r} list"
        if self.kind == "pair":
            return f"({self.args[0]!r}, {self.args[1]!r})"
        if self.kind == "enum":
            return "enum {" + ", ".join(self.args) + "}"
        return self.kind


T_UNIT = VType("unit")
T_BOOL = VType("bool")
T_INT = VType("int")
T_STR = VType("str")


def t_list(elem: VType) -> VType:
    return VType("list", (elem,))


def t_pair(a: VType, b: VType) -> VType:
    return VType("pair", (a, b))


def t_enum(*tags: str) -> VType:
    return VType("enum", tuple(tags))


# ---------------------------------------------------------------------------
# channels and prisms


@dataclass(frozen=True)
class ChanDecl:
    name: str
    payload_kind: VType = T_UNIT
    enum_domain: Optional[Tuple[Value, ...]] = None

    def __post_init__(self):
        if self.enum_domain is not None:
            for v in self.enum_domain:
                if not self.payload_kind.matches(v):
                    raise SchemaError(
                        f"channel {self.name}: domain value {format_value(v)} "
                        f"does not match payload type {self.payload_kind!r}"
                    )


class Registry:
    """Channel declarations in scope; names are unique."""

    def __init__(self):
        self._decls: dict[str, ChanDecl] = {}

    def declare(self, decl: ChanDecl) -> ChanDecl:
        if decl.name in self._decls:
            raise SchemaError(f"channel {decl.name} already declared")
        self._decls[decl.name] = decl
        return decl

    def lookup(self, name: str) -> ChanDecl:
        try:
            return self._decls[name]
        except KeyError:
            raise SchemaError(f"channel {name} not declared") from None

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def decls(self) -> Iterable[ChanDecl]:
        return self._decls.values()


@dataclass(frozen=True)
class Prism:
    decl: ChanDecl

    def build(self, v: Value) -> Event:
        if not self.decl.payload_kind.matches(v):
            raise SchemaError(
                f"channel {self.decl.name}: payload {format_value(v)} does not "
                f"match {self.decl.payload_kind!r}"
            )
        return Event(self.decl.name, v)

    def match(self, e: Event) -> Optional[Value]:
        """Succeeds exactly on events of this channel."""
        if e.channel == self.decl.name:
            return e.payload
        return None


def prism_of(decl: ChanDecl) -> Prism:
    return Prism(decl)


# ---------------------------------------------------------------------------
# state spaces


class StateSchema:
    """Fixed, ordered set of typed fields."""

    __slots__ = ("fields", "_index")

    def __init__(self, fields: Sequence[Tuple[str, VType]] = ()):
        self.fields: Tuple[Tuple[str, VType], ...] = tuple(fields)
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate state fields in {names}")
        self._index = {n: i for i, n in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"state field {name} not declared") from None

    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.fields)

    def type_of(self, name: str) -> VType:
        return self.fields[self.index(name)][1]

    def make(self, **values: Value) -> "StateSpace":
        vals = []
        for n, ty in self.fields:
            if n not in values:
                raise SchemaError(f"missing initial value for field {n}")
            vals.append(values[n])
        extra = set(values) - set(self.names())
        if extra:
            raise SchemaError(f"unknown state fields {sorted(extra)}")
        return StateSpace(self, tuple(vals))

    def __eq__(self, other) -> bool:
        return isinstance(other, StateSchema) and self.fields == other.fields

    def __hash__(self) -> int:
        return hash(self.fields)

    def __repr__(self) -> str:
        return "schema{" + ", ".join(f"{n}: {t!r}" for n, t in self.fields) + "}"


EMPTY_SCHEMA = StateSchema()


class StateSpace:
    """Immutable record of field values conforming to a schema."""

    __slots__ = ("schema", "values")

    def __init__(self, schema: StateSchema, values: Tuple[Value, ...]):
        if len(values) != len(schema.fields):
            raise SchemaError("state does not match schema arity")
        for (n, ty), v in zip(schema.fields, values):
            if not ty.matches(v):
                raise SchemaError(
                    f"field {n}: value {format_value(v)} does not match {ty!r}"
                )
        self.schema = schema
        self.values = values

    def __getitem__(self, name: str) -> Value:
        return self.values[self.schema.index(name)]

    def put(self, name: str, v: Value) -> "StateSpace":
        i = self.schema.index(name)
        vals = list(self.values)
        vals[i] = v
        return StateSpace(self.schema, tuple(vals))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StateSpace)
            and self.schema == other.schema
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.schema, self.values))

    def __repr__(self) -> str:
        body = ", ".join(
            f"{n}: {format_value(v)}" for (n, _), v in zip(self.schema.fields, self.values)
        )
        return "{" + body + "}"


EMPTY_STATE = EMPTY_SCHEMA.make()


# ---------------------------------------------------------------------------
# lenses


@dataclass(frozen=True)
class Lens:
    footprint: frozenset
    get: Callable[[StateSpace], Value] = field(compare=False)
    put: Callable[[StateSpace, Value], StateSpace] = field(compare=False)


def field_lens(name: str) -> Lens:
    return Lens(
        footprint=frozenset({name}),
        get=lambda s: s[name],
        put=lambda s, v: s.put(name, v),
    )


def fields_lens(names: Sequence[str]) -> Lens:
    """Composite lens over several fields; the view is the list of values."""
    names = tuple(names)
    if len(names) == 1:
        return field_lens(names[0])

    def get(s: StateSpace) -> Value:
        return VList(tuple(s[n] for n in names))

    def put(s: StateSpace, v: Value) -> StateSpace:
        if not isinstance(v, VList) or len(v.items) != len(names):
            raise SchemaError(f"composite lens over {names} expects a {len(names)}-list")
        for n, x in zip(names, v.items):
            s = s.put(n, x)
        return s

    return Lens(footprint=frozenset(names), get=get, put=put)


EMPTY_LENS = Lens(footprint=frozenset(), get=lambda s: UNIT, put=lambda s, v: s)


def lens_indep(x: Lens, y: Lens) -> bool:
    return not (x.footprint & y.footprint)


def lens_override(s1: StateSpace, s2: StateSpace, x: Lens) -> StateSpace:
    """Fields in x's footprint come from s2, all others from s1."""
    if s1.schema != s2.schema:
        raise SchemaError("lens_override across different schemas")
    out = s1
    for name in x.footprint:
        out = out.put(name, s2[name])
    return out


# ---------------------------------------------------------------------------
# expressions and substitutions


@dataclass(frozen=True)
class Expr:
    reads: frozenset
    eval: Callable[[StateSpace], Value] = field(compare=False)


def const_expr(v: Value) -> Expr:
    return Expr(reads=frozenset(), eval=lambda s: v)


def read_expr(x: Lens) -> Expr:
    return Expr(reads=x.footprint, eval=x.get)


def app_expr(fn: Callable[..., Value], *args: Expr) -> Expr:
    reads = frozenset().union(*(a.reads for a in args)) if args else frozenset()
    return Expr(reads=reads, eval=lambda s: fn(*(a.eval(s) for a in args)))


def unrestricted(x: Lens, e: Expr) -> bool:
    """True when e provably does not read x."""
    return not (x.footprint & e.reads)


class Subst:
    """Simultaneous lens updates; right-hand sides read the pre-state."""

    __slots__ = ("assignments",)

    def __init__(self, assignments: Sequence[Tuple[Lens, Expr]] = ()):
        self.assignments = tuple(assignments)

    def __call__(self, s: StateSpace) -> StateSpace:
        return subst_apply(self, s)

    def __repr__(self) -> str:
        body = ", ".join(f"{sorted(l.footprint)} ~> <expr>" for l, _ in self.assignments)
        return "[" + body + "]"


ID_SUBST = Subst()


def subst_apply(sigma: Subst, s: StateSpace) -> StateSpace:
    vals = [(lens, e.eval(s)) for lens, e in sigma.assignments]
    out = s
    for lens, v in vals:
        out = lens.put(out, v)
    return out
