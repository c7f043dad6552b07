"""Interactive simulation: session engine, terminal CLI, session server."""

from .session import (
    Accepted,
    Activity,
    Deadlocked,
    Ended,
    ManySteps,
    Menu,
    Rejected,
    Session,
    SimConfig,
    StateNote,
    Terminated,
    advance,
    choose,
    continue_,
    start_session,
)
