"""Session state machine for interactive simulation.

Mirrors the counting simulator loop: τs are stepped silently up to a
threshold (noting internal activity on the first), then the human is asked
whether to continue; returns terminate the session, empty menus deadlock
it, and nonempty menus await a choice.  Rejected inputs leave the session
unchanged.  Sessions are immutable: every operation returns a fresh
session plus the messages it emitted.

For a stateful process whose body is one top-level loop, the session runs
the loop itself: each iteration boundary costs one τ (exactly like the
kernel loop) and surfaces the new state, so menus carry the live state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

from ..itree import ITree, Ret, Sil
from ..lang.elab import SimTarget
from ..optics import StateSpace
from ..semantics import Tick
from ..values import Event


@dataclass(frozen=True)
class SimConfig:
    tau_prompt_threshold: int = 20
    max_menu: Optional[int] = None  # CLI display cap; menus themselves are full
    max_depth: Optional[int] = None  # end the session after this many accepted events

    def __post_init__(self):
        if self.tau_prompt_threshold < 1:
            raise ValueError("tau_prompt_threshold must be at least 1")


# -- messages -----------------------------------------------------------------


@dataclass(frozen=True)
class Menu:
    events: Tuple[Event, ...]


@dataclass(frozen=True)
class Terminated:
    value: object


@dataclass(frozen=True)
class Deadlocked:
    pass


@dataclass(frozen=True)
class ManySteps:
    count: int


@dataclass(frozen=True)
class Accepted:
    event: Event


@dataclass(frozen=True)
class Rejected:
    input: object
    reason: str = ""


@dataclass(frozen=True)
class StateNote:
    text: str


@dataclass(frozen=True)
class Activity:
    pass


@dataclass(frozen=True)
class Ended:
    pass


SimMsg = Union[Menu, Terminated, Deadlocked, ManySteps, Accepted, Rejected, StateNote, Activity, Ended]


# -- session ------------------------------------------------------------------


@dataclass(frozen=True)
class Session:
    target: SimTarget
    current: ITree
    config: SimConfig
    trace: tuple = ()
    tau_count: int = 0
    status: str = "fresh"  # fresh | menu | awaiting_continue | terminated | deadlocked | ended
    menu: Tuple[Event, ...] = ()
    result: object = None
    loop_state: Optional[StateSpace] = None

    @property
    def running(self) -> bool:
        return self.status in ("fresh", "menu", "awaiting_continue")

    @property
    def events_taken(self) -> int:
        return sum(1 for x in self.trace if isinstance(x, Event))


def start_session(target: SimTarget, config: SimConfig = SimConfig()) -> Tuple[Session, List[SimMsg]]:
    if target.loop_action is not None:
        # entering the loop is itself a τ; advance() treats the Ret as the
        # iteration boundary, so τ counts match the kernel loop exactly
        s = Session(
            target=target,
            current=Ret(target.init_state),
            config=config,
            loop_state=target.init_state,
        )
    else:
        s = Session(target=target, current=target.tree, config=config)
    return advance(s)


def advance(s: Session) -> Tuple[Session, List[SimMsg]]:
    """Step through τs to the next interaction point, emitting messages."""
    msgs: List[SimMsg] = []
    current = s.current
    tau = s.tau_count
    loop_state = s.loop_state
    trace = s.trace
    managed = s.target.loop_action is not None
    while True:
        node = current.force()
        if isinstance(node, Ret) and managed:
            # loop boundary: one τ, then re-enter the body with the new state
            if tau == 0:
                msgs.append(Activity())
            if tau >= s.config.tau_prompt_threshold:
                msgs.append(ManySteps(tau))
                return (
                    replace(s, current=current, tau_count=tau, status="awaiting_continue",
                            loop_state=loop_state, trace=trace),
                    msgs,
                )
            tau += 1
            loop_state = node.value
            current = s.target.loop_action(loop_state)
            continue
        if isinstance(node, Ret):
            msgs.append(Terminated(node.value))
            return (
                replace(s, current=current, tau_count=tau, status="terminated",
                        result=node.value, trace=trace + (Tick(node.value),)),
                msgs,
            )
        if isinstance(node, Sil):
            if tau == 0:
                msgs.append(Activity())
            if tau >= s.config.tau_prompt_threshold:
                msgs.append(ManySteps(tau))
                return (
                    replace(s, current=current, tau_count=tau, status="awaiting_continue",
                            loop_state=loop_state, trace=trace),
                    msgs,
                )
            tau += 1
            current = node.child
            continue
        # Vis
        if node.choices.is_empty():
            msgs.append(Deadlocked())
            return (
                replace(s, current=current, tau_count=tau, status="deadlocked",
                        loop_state=loop_state, trace=trace),
                msgs,
            )
        menu = tuple(node.choices.keys())
        if managed and loop_state is not None:
            msgs.append(StateNote(repr(loop_state)))
        msgs.append(Menu(menu))
        return (
            replace(s, current=current, tau_count=tau, status="menu", menu=menu,
                    loop_state=loop_state, trace=trace),
            msgs,
        )


def choose(s: Session, choice) -> Tuple[Session, List[SimMsg]]:
    """Pick a menu entry by event or 0-based index; bad picks are rejected."""
    if s.status != "menu":
        return s, [Rejected(choice, "no menu is on offer")]
    if isinstance(choice, int):
        if not (0 <= choice < len(s.menu)):
            return s, [Rejected(choice, "index out of range")]
        event = s.menu[choice]
    elif isinstance(choice, Event):
        event = choice
    else:
        return s, [Rejected(choice, "not an event or index")]
    node = s.current.force()
    if event not in node.choices:
        return s, [Rejected(event)]
    nxt = replace(
        s,
        current=node.choices[event],
        trace=s.trace + (event,),
        tau_count=0,
        status="fresh",
        menu=(),
    )
    msgs: List[SimMsg] = [Accepted(event)]
    if s.config.max_depth is not None and nxt.events_taken >= s.config.max_depth:
        msgs.append(Ended())
        return replace(nxt, status="ended"), msgs
    nxt, more = advance(nxt)
    return nxt, msgs + more


def continue_(s: Session, keep_going: bool = True) -> Tuple[Session, List[SimMsg]]:
    """Answer the many-steps prompt."""
    if s.status != "awaiting_continue":
        return s, [Rejected("continue", "nothing to continue")]
    if not keep_going:
        return replace(s, status="ended"), [Ended()]
    return advance(replace(s, tau_count=0, status="fresh"))


def reset(s: Session) -> Tuple[Session, List[SimMsg]]:
    return start_session(s.target, s.config)
