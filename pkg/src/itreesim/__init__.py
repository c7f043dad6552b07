"""Executable interaction-tree kernel for deterministic CSP and Circus.

Lazy Ret/Sil/Vis trees give processes their operational meaning; operator
layers add communication, choice, parallel, hiding, and state; bounded
checkers decide bisimulation and the traces/failures/divergences view up
to configurable depth and τ budgets; a small process language and an
interactive simulator sit on top.
"""

from .values import (
    UNIT,
    TRUE,
    FALSE,
    Event,
    EventSet,
    VBool,
    VEnum,
    VInt,
    VList,
    VPair,
    VStr,
    VUnit,
    Value,
    channels_of,
    events_of,
    format_event,
    format_value,
    vbool,
    vint,
    vlist,
    vpair,
)
from .pfun import PFun, lam_on, map_pfun, merge_excl, pid_on
from .optics import (
    ChanDecl,
    Expr,
    Lens,
    Prism,
    Registry,
    SchemaError,
    StateSchema,
    StateSpace,
    Subst,
    T_BOOL,
    T_INT,
    T_STR,
    T_UNIT,
    app_expr,
    const_expr,
    field_lens,
    fields_lens,
    lens_indep,
    lens_override,
    prism_of,
    read_expr,
    subst_apply,
    t_enum,
    t_list,
    t_pair,
    unrestricted,
)
from .itree import (
    BisimVerdict,
    FuelExhausted,
    ITree,
    Ret,
    Sil,
    Stable,
    Suspend,
    Vis,
    bind,
    bisim_to_depth,
    div,
    iter_,
    kleisli,
    loop,
    ret,
    run,
    sil,
    skip,
    stabilises_within,
    stop,
    suspend,
    vis,
    weak_bisim_to_depth,
    while_,
)
from .csp import (
    Both,
    ChannelError,
    Left,
    Right,
    cpar,
    extchoice,
    gpar,
    guard,
    hide,
    inp,
    interleave,
    merge_fn,
    outp,
    sync,
)
from .circus import (
    CircusAction,
    assign,
    assigns,
    cextchoice,
    cguard,
    cloop,
    cseq,
    cskip,
    circus_par,
    cwhile,
    encapsulate,
    input_prefix,
    lift_tree,
    output_prefix,
)
from .semantics import (
    Divergences,
    FailureDesc,
    HealthReport,
    Tick,
    div_free,
    divergences,
    failure_check,
    failures_enum,
    healthiness_suite,
    refuses,
    steps,
    tick_steps,
    traces,
)

__version__ = "0.1.0"
