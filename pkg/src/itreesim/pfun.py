"""Computable partial functions with a deterministic entry order.

A ``PFun`` is a finite map realized as a distinct-key association list
(insertion-ordered), so its domain is enumerable: simulator menus, choice
merging, and parallel composition all iterate over it.  Instances are
immutable; every operation returns a fresh PFun.  Equality is map equality
and ignores entry order.
"""

from __future__ import annotations

from typing import Callable, Generic, Hashable, Iterable, Iterator, Tuple, TypeVar

K = TypeVar("K", bound=Hashable)
V = TypeVar("V")
W = TypeVar("W")


class DuplicateKeyError(ValueError):
    pass


class PFun(Generic[K, V]):
    __slots__ = ("_entries",)

    def __init__(self, entries: dict):
        # internal: callers go through of()/empty()/singleton()
        self._entries = entries

    @staticmethod
    def empty() -> "PFun[K, V]":
        return _EMPTY

    @staticmethod
    def of(pairs: Iterable[Tuple[K, V]]) -> "PFun[K, V]":
        """Build from pairs; duplicate keys are rejected."""
        d: dict = {}
        for k, v in pairs:
            if k in d:
                raise DuplicateKeyError(f"duplicate key {k!r}")
            d[k] = v
        return PFun(d)

    @staticmethod
    def singleton(k: K, v: V) -> "PFun[K, V]":
        return PFun({k: v})

    # -- queries ---------------------------------------------------------

    def dom(self) -> frozenset:
        return frozenset(self._entries)

    def keys(self) -> Iterator[K]:
        return iter(self._entries)

    def items(self) -> Iterator[Tuple[K, V]]:
        return iter(self._entries.items())

    def get(self, k: K, default=None):
        return self._entries.get(k, default)

    def __getitem__(self, k: K) -> V:
        return self._entries[k]

    def __contains__(self, k: K) -> bool:
        return k in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[K]:
        return iter(self._entries)

    def is_empty(self) -> bool:
        return not self._entries

    # -- operations ------------------------------------------------------

    def override(self, g: "PFun[K, V]") -> "PFun[K, V]":
        """Right-biased union: on dom(g) the result agrees with g.

        Entry order: f's entries first (values updated where g overrides),
        then g's new keys in g's order.
        """
        if not g._entries:
            return self
        if not self._entries:
            return g
        d = dict(self._entries)
        d.update(g._entries)
        return PFun(d)

    def dom_restrict(self, allowed) -> "PFun[K, V]":
        """Keep entries whose key is in `allowed` (any container), in order."""
        return PFun({k: v for k, v in self._entries.items() if k in allowed})

    def dom_subtract(self, banned) -> "PFun[K, V]":
        """Drop entries whose key is in `banned`."""
        return PFun({k: v for k, v in self._entries.items() if k not in banned})

    def map_values(self, h: Callable[[V], W]) -> "PFun[K, W]":
        return PFun({k: h(v) for k, v in self._entries.items()})

    def merge_excl(self, g: "PFun[K, V]") -> "PFun[K, V]":
        """Exclusive merge: keys common to both sides are dropped.

        Equal to (dom(g) -< f) override (dom(f) -< g); f's surviving
        entries come first, then g's.
        """
        fd, gd = self._entries, g._entries
        d = {k: v for k, v in fd.items() if k not in gd}
        d.update((k, v) for k, v in gd.items() if k not in fd)
        return PFun(d)

    # -- equality / display -----------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, PFun) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r} -> {v!r}" for k, v in self._entries.items())
        return "{" + body + "}"


_EMPTY: PFun = PFun({})


def empty() -> PFun:
    return PFun.empty()


def override(f: PFun, g: PFun) -> PFun:
    return f.override(g)


def dom_restrict(allowed, f: PFun) -> PFun:
    return f.dom_restrict(allowed)


def lam_on(xs: Iterable[K], body: Callable[[K], V]) -> PFun[K, V]:
    """The partial lambda over an explicit duplicate-free key list."""
    return PFun.of((k, body(k)) for k in xs)


def map_pfun(h: Callable[[V], W], f: PFun[K, V]) -> PFun[K, W]:
    return f.map_values(h)


def merge_excl(f: PFun, g: PFun) -> PFun:
    return f.merge_excl(g)


def pid_on(xs: Iterable[K]) -> PFun[K, K]:
    """Identity partial function on the given keys."""
    return lam_on(xs, lambda k: k)
