"""State-rich action layer: assignments, prefixes, choice, name-set parallel."""

import pytest

from itreesim.circus import (
    CircusAction,
    assign,
    assigns,
    cextchoice,
    cguard,
    circus_par,
    cloop,
    cseq,
    cskip,
    encapsulate,
    input_prefix,
    lift_tree,
    output_prefix,
)
from itreesim.itree import (
    Ret,
    Vis,
    bind,
    bisim_to_depth,
    stabilises_within,
    weak_bisim_to_depth,
)
from itreesim.optics import (
    ChanDecl,
    SchemaError,
    StateSchema,
    Subst,
    T_INT,
    app_expr,
    const_expr,
    field_lens,
    read_expr,
    t_list,
)
from itreesim.semantics import traces
from itreesim.values import (
    EMPTY_EVENTS,
    Event,
    VInt,
    VList,
    format_event,
    vint,
    vlist,
)

SCHEMA = StateSchema([("x", T_INT), ("y", T_INT)])
X, Y = field_lens("x"), field_lens("y")
CH = ChanDecl("c", T_INT)
DH = ChanDecl("d", T_INT)


def st(x=0, y=0):
    return SCHEMA.make(x=vint(x), y=vint(y))


def final_state(t):
    r = stabilises_within(t, 100)
    assert isinstance(r.node, Ret)
    return r.node.value


def inc(e):
    return app_expr(lambda v: vint(v.n + 1), e)


def test_assigns_identity():
    s = st(3, 4)
    n = assigns(lambda q: q)(s).force()
    assert isinstance(n, Ret) and n.value == s


def test_assign_updates_field():
    act = assign(X, const_expr(vint(9)))
    assert final_state(act(st(0, 5))) == st(9, 5)


def test_assign_commutes_under_side_conditions():
    # x := e ; y := f  =  y := f ; x := e   when x #| y, x ♯ f, y ♯ e
    e = const_expr(vint(1))
    f = inc(read_expr(X))  # reads x only; x is not independent of it, so use y:=f carefully
    # choose f reading neither... the side-condition needs x ♯ f and y ♯ e
    f_ok = const_expr(vint(7))
    lhs = cseq(assign(X, e), assign(Y, f_ok))
    rhs = cseq(assign(Y, f_ok), assign(X, e))
    for s in (st(0, 0), st(2, 3)):
        assert bisim_to_depth(lhs(s), rhs(s), depth=8).is_true


def test_assigns_compose():
    sigma = Subst([(X, inc(read_expr(X)))])
    rho = Subst([(Y, read_expr(X))])
    lhs = cseq(assigns(sigma), assigns(rho))
    rhs = assigns(lambda s: rho(sigma(s)))
    for s in (st(0, 9), st(5, 5)):
        assert bisim_to_depth(lhs(s), rhs(s), depth=4).is_true


def test_input_prefix_threads_state():
    # c?(i) -> x := i, from x=0: choosing c.1 ends with x=1
    act = input_prefix(CH, [vint(0), vint(1)], lambda i: assign(X, const_expr(i)))
    t = act(st(0, 7))
    n = t.force()
    assert isinstance(n, Vis)
    assert [format_event(e) for e in n.choices] == ["c.0", "c.1"]
    assert final_state(n.choices[Event("c", vint(1))]) == st(1, 7)


def test_input_prefix_empty_domain_is_stop():
    act = input_prefix(CH, [], lambda i: cskip())
    n = act(st()).force()
    assert isinstance(n, Vis) and n.choices.is_empty()


def test_input_menu_independent_of_state():
    act = input_prefix(CH, [vint(0), vint(1)], lambda i: cskip())
    m1 = act(st(0, 0)).force().choices.dom()
    m2 = act(st(5, 9)).force().choices.dom()
    assert m1 == m2


def test_output_prefix_evaluates_expr():
    act = output_prefix(DH, read_expr(X), cskip())
    n = act(st(5)).force()
    assert [format_event(e) for e in n.choices] == ["d.5"]
    assert final_state(n.choices[Event("d", vint(5))]) == st(5)


def test_output_constant_behaves_as_outp():
    act = output_prefix(DH, const_expr(vint(3)), cskip())
    n = act(st(1, 2)).force()
    assert [format_event(e) for e in n.choices] == ["d.3"]


def test_guard_excludes_branch():
    # (x > 0) & d!x -> skip  from x=0 deadlocks that branch
    gt0 = app_expr(lambda v: __import__("itreesim.values", fromlist=["vbool"]).vbool(v.n > 0), read_expr(X))
    out = output_prefix(DH, read_expr(X), cskip())
    choice = cextchoice(cguard(gt0, out), input_prefix(CH, [vint(1)], lambda i: assign(X, const_expr(i))))
    n0 = choice(st(0)).force()
    assert [e.channel for e in n0.choices] == ["c"]
    n1 = choice(st(4)).force()
    assert {e.channel for e in n1.choices.dom()} == {"c", "d"}


def test_assigns_distributes_over_choice():
    sigma = Subst([(X, const_expr(vint(2)))])
    p = output_prefix(DH, read_expr(X), cskip())
    q = input_prefix(CH, [vint(0)], lambda i: cskip())
    lhs = cseq(assigns(sigma), cextchoice(p, q))
    rhs = cextchoice(cseq(assigns(sigma), p), cseq(assigns(sigma), q))
    for s in (st(0, 0), st(7, 1)):
        assert bisim_to_depth(lhs(s), rhs(s), depth=16).is_true


def test_circus_par_merges_disjoint_writes():
    p = assign(X, const_expr(vint(1)))
    q = assign(Y, const_expr(vint(2)))
    par = circus_par(p, X, EMPTY_EVENTS, Y, q)
    assert final_state(par(st(9, 9))) == st(1, 2)


def test_circus_par_skip_keeps_state():
    par = circus_par(cskip(), X, EMPTY_EVENTS, Y, cskip())
    s = st(3, 4)
    assert final_state(par(s)) == s


def test_circus_par_requires_independence():
    with pytest.raises(SchemaError):
        circus_par(cskip(), X, EMPTY_EVENTS, X, cskip())


def test_circus_par_commutes_with_swapped_name_sets():
    p = assign(X, inc(read_expr(X)))
    q = assign(Y, const_expr(vint(8)))
    lhs = circus_par(p, X, EMPTY_EVENTS, Y, q)
    rhs = circus_par(q, Y, EMPTY_EVENTS, X, p)
    for s in (st(0, 0), st(4, 4)):
        assert bisim_to_depth(lhs(s), rhs(s), depth=16).is_true


def test_schema_mismatch_rejected():
    other = StateSchema([("z", T_INT)])
    act = CircusAction(lambda s: Ret(s), SCHEMA)
    with pytest.raises(SchemaError):
        act(other.make(z=vint(0)))


def test_schema_preserved_along_returns():
    act = cseq(assign(X, const_expr(vint(1))), assign(Y, read_expr(X)))
    out = final_state(act(st(5, 5)))
    assert out.schema == SCHEMA


def test_lift_and_encapsulate():
    from itreesim.csp import outp
    from itreesim.values import UNIT

    t = outp(DH, vint(1))
    act = lift_tree(t)
    s = st(2, 2)
    n = act(s).force()
    assert isinstance(n, Vis)
    assert final_state(n.choices[Event("d", vint(1))]) == s
    enc = encapsulate(assign(X, const_expr(vint(3))), st())
    r = stabilises_within(enc, 10)
    assert r.node.value == UNIT
