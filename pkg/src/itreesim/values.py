"""Dynamic value universe, channel-tagged events, and finite event sets.

Values form a closed tagged union (unit, bool, int, str, list, pair, enum
tag).  Everything is immutable and hashable so values can key partial
functions and memo tables.  The canonical text form produced by
``format_value`` is what simulator menus display; the matching parser lives
in :mod:`itreesim.lang.parser`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True)
class VUnit:
    def __repr__(self) -> str:
        return "()"


@dataclass(frozen=True)
class VBool:
    b: bool

    def __repr__(self) -> str:
        return "true" if self.b else "false"


@dataclass(frozen=True)
class VInt:
    n: int

    def __repr__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class VStr:
    s: str

    def __repr__(self) -> str:
        return _quote(self.s)


@dataclass(frozen=True)
class VList:
    items: tuple

    def __repr__(self) -> str:
        return "[" + ",".join(map(format_value, self.items)) + "]"


@dataclass(frozen=True)
class VPair:
    fst: "Value"
    snd: "Value"

    def __repr__(self) -> str:
        return f"({format_value(self.fst)},{format_value(self.snd)})"


@dataclass(frozen=True)
class VEnum:
    tag: str

    def __repr__(self) -> str:
        return self.tag


Value = Union[VUnit, VBool, VInt, VStr, VList, VPair, VEnum]

UNIT = VUnit()
TRUE = VBool(True)
FALSE = VBool(False)


def vbool(b: bool) -> VBool:
    return TRUE if b else FALSE


def vint(n: int) -> VInt:
    return VInt(n)


def vlist(items: Iterable[Value]) -> VList:
    return VList(tuple(items))


def vpair(a: Value, b: Value) -> VPair:
    return VPair(a, b)


def _quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def format_value(v: Value) -> str:
    """Canonical text form; round-trips through the language parser."""
    return repr(v)


def value_to_json(v: Value):
    """JSON encoding used by the wire protocol (documented in the README)."""
    if isinstance(v, VUnit):
        return None
    if isinstance(v, VBool):
        return v.b
    if isinstance(v, VInt):
        return v.n
    if isinstance(v, VStr):
        return v.s
    if isinstance(v, VList):
        return [value_to_json(x) for x in v.items]
    if isinstance(v, VPair):
        return {"pair": [value_to_json(v.fst), value_to_json(v.snd)]}
    if isinstance(v, VEnum):
        return {"enum": v.tag}
    raise TypeError(f"not a Value: {v!r}")


def value_from_json(obj) -> Value:
    if obj is None:
        return UNIT
    if isinstance(obj, bool):
        return vbool(obj)
    if isinstance(obj, int):
        return VInt(obj)
    if isinstance(obj, str):
        return VStr(obj)
    if isinstance(obj, list):
        return VList(tuple(value_from_json(x) for x in obj))
    if isinstance(obj, dict):
        if "pair" in obj:
            a, b = obj["pair"]
            return VPair(value_from_json(a), value_from_json(b))
        if "enum" in obj:
            return VEnum(obj["enum"])
    raise ValueError(f"not a Value encoding: {obj!r}")


@dataclass(frozen=True)
class Event:
    """A channel name applied to a payload value."""

    channel: str
    payload: Value = UNIT

    def __post_init__(self):
        # events key every choice map; cache the hash once
        object.__setattr__(self, "_hash", hash((self.channel, self.payload)))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if isinstance(self.payload, VUnit):
            return self.channel
        return f"{self.channel}.{format_value(self.payload)}"


def format_event(e: Event) -> str:
    return repr(e)


def event_to_json(e: Event):
    return {"channel": e.channel, "value": value_to_json(e.payload), "text": format_event(e)}


def event_from_json(obj) -> Event:
    if not isinstance(obj, dict) or "channel" not in obj:
        raise ValueError(f"not an Event encoding: {obj!r}")
    return Event(obj["channel"], value_from_json(obj.get("value")))


class EventSet:
    """Finite-or-channel-complete event set used by parallel and hiding.

    Holds explicit events plus whole channels ("every event of channel c"),
    since synchronization sets must cover channels whose alphabet is large
    or unbounded.  Only membership is needed by the operators.
    """

    __slots__ = ("events", "channels")

    def __init__(self, events: Iterable[Event] = (), channels: Iterable[str] = ()):
        self.events = frozenset(events)
        self.channels = frozenset(channels)

    def __contains__(self, e: Event) -> bool:
        return e.channel in self.channels or e in self.events

    def is_empty(self) -> bool:
        return not self.events and not self.channels

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EventSet)
            and self.events == other.events
            and self.channels == other.channels
        )

    def __hash__(self) -> int:
        return hash((self.events, self.channels))

    def __repr__(self) -> str:
        parts = [format_event(e) for e in sorted(self.events, key=format_event)]
        parts += [f"{c}.*" for c in sorted(self.channels)]
        return "{" + ", ".join(parts) + "}"


EMPTY_EVENTS = EventSet()


def events_of(*events: Event) -> EventSet:
    return EventSet(events=events)


def channels_of(*names: str) -> EventSet:
    return EventSet(channels=names)
