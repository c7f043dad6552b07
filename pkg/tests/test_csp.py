"""CSP operator equations and the §-style law block at bounded depth."""

import random

import pytest

from itreesim.csp import (
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
from itreesim.itree import (
    Ret,
    Sil,
    Vis,
    bind,
    bisim_to_depth,
    div,
    iter_,
    ret,
    skip,
    stabilises_within,
    stop,
    vis,
    weak_bisim_to_depth,
)
from itreesim.laws import default_events, random_itree
from itreesim.optics import ChanDecl, SchemaError, T_INT, T_UNIT
from itreesim.pfun import PFun
from itreesim.semantics import Tick, traces
from itreesim.values import (
    EMPTY_EVENTS,
    UNIT,
    Event,
    VBool,
    VInt,
    channels_of,
    events_of,
    format_event,
)

A, B, C = default_events(3)
CH = ChanDecl("c", T_INT)
DH = ChanDecl("d", T_INT)
E0 = ChanDecl("e", T_UNIT)


def ints(*ns):
    return [VInt(n) for n in ns]


def corpus(n=40, seed=11):
    rng = random.Random(seed)
    return [random_itree(rng, [A, B, C]) for _ in range(n)]


def unit_corpus(n=40, seed=12):
    return [bind(p, lambda _v: skip()) for p in corpus(n, seed)]


# -- communication primitives ---------------------------------------------------


def test_inp_menu_and_return():
    t = inp(CH, ints(0, 1, 2, 3))
    n = t.force()
    assert [format_event(e) for e in n.choices] == ["c.0", "c.1", "c.2", "c.3"]
    cont = n.choices[Event("c", VInt(2))].force()
    assert isinstance(cont, Ret) and cont.value == VInt(2)


def test_inp_empty_is_stop():
    assert bisim_to_depth(inp(CH, []), stop()).is_true


def test_inp_uses_declared_domain():
    c = ChanDecl("c", T_INT, enum_domain=tuple(ints(0, 1)))
    assert len(inp(c).force().choices) == 2
    # explicit domain intersects the declared one
    assert len(inp(c, ints(1, 5)).force().choices) == 1
    with pytest.raises(ChannelError):
        inp(CH)  # no domain anywhere


def test_outp_and_sync():
    t = outp(DH, VInt(6))
    n = t.force()
    assert [format_event(e) for e in n.choices] == ["d.6"]
    assert isinstance(n.choices[Event("d", VInt(6))].force(), Ret)
    s = sync(E0).force()
    assert [format_event(e) for e in s.choices] == ["e"]
    with pytest.raises(SchemaError):
        outp(DH, VBool(True))


def test_do_block_trace():
    # x <- inp c {1}; outp d (2*x)
    prog = bind(inp(CH, ints(1)), lambda x: outp(DH, VInt(2 * x.n)))
    trs = traces(prog, 3)
    assert (Event("c", VInt(1)), Event("d", VInt(2)), Tick(UNIT)) in trs


def test_guard():
    assert bisim_to_depth(guard(True), skip()).is_true
    assert bisim_to_depth(guard(False), stop()).is_true
    p = vis({A: stop()})
    guarded = bind(guard(True), lambda _x: p)
    assert weak_bisim_to_depth(guarded, p).is_true
    assert weak_bisim_to_depth(bind(guard(False), lambda _x: p), stop()).is_true


# -- external choice -------------------------------------------------------------


def test_extchoice_clash_is_stop():
    p = vis({A: ret(VInt(1))})
    q = vis({A: ret(VInt(2))})
    n = extchoice(p, q).force()
    assert isinstance(n, Vis) and n.choices.is_empty()


def test_extchoice_law_block():
    corp = corpus()
    for p in corp:
        assert bisim_to_depth(extchoice(stop(), p), p, depth=64).is_true
        assert weak_bisim_to_depth(extchoice(div(), p), div(), depth=64).is_true
    rng = random.Random(13)
    for _ in range(40):
        p, q = rng.choice(corp), rng.choice(corp)
        assert bisim_to_depth(extchoice(p, q), extchoice(q, p), depth=64).passes


def test_extchoice_tau_extraction():
    p = vis({A: stop()})
    q = vis({B: skip()})
    lhs = extchoice(p, Sil(Sil(q)))
    rhs = Sil(Sil(extchoice(p, q)))
    assert bisim_to_depth(lhs, rhs, depth=64).is_true
    lhs2 = extchoice(Sil(Sil(p)), q)
    assert bisim_to_depth(lhs2, rhs, depth=64).is_true


def test_extchoice_ret_priority():
    # Ret beats Vis on either side
    assert extchoice(ret(VInt(1)), vis({A: stop()})).force().value == VInt(1)
    assert extchoice(vis({A: stop()}), ret(VInt(2))).force().value == VInt(2)
    # equal returns agree, unequal deadlock
    assert extchoice(ret(VInt(1)), ret(VInt(1))).force().value == VInt(1)
    n = extchoice(ret(VInt(1)), ret(VInt(2))).force()
    assert isinstance(n, Vis) and n.choices.is_empty()


def test_extchoice_left_distribution():
    f = vis({A: ret(VInt(1)), B: ret(VInt(2))})
    g = vis({C: ret(VInt(3))})
    h = lambda v: vis({A: ret(v)})
    lhs = bind(extchoice(f, g), h)
    rhs = extchoice(bind(f, h), bind(g, h))
    assert bisim_to_depth(lhs, rhs, depth=64).is_true


# -- merge and parallel -----------------------------------------------------------


def test_merge_fn_clauses():
    P, Q, R = ret(VInt(1)), ret(VInt(2)), ret(VInt(3))
    f = PFun.of([(A, P)])
    g = PFun.of([(B, Q)])
    m = merge_fn(EMPTY_EVENTS, f, g)
    assert isinstance(m[A], Left) and isinstance(m[B], Right)
    m2 = merge_fn(events_of(A), PFun.of([(A, P)]), PFun.of([(A, Q)]))
    assert isinstance(m2[A], Both)
    m3 = merge_fn(EMPTY_EVENTS, PFun.of([(A, P)]), PFun.of([(A, Q)]))
    assert m3.is_empty()
    # display order: left-independent, right-independent, synchronized
    m4 = merge_fn(events_of(C), PFun.of([(A, P), (C, P)]), PFun.of([(B, Q), (C, Q)]))
    assert list(m4.keys()) == [A, B, C]


def test_gpar_ret_pairs():
    n = gpar(ret(VInt(1)), EMPTY_EVENTS, ret(VInt(2))).force()
    assert isinstance(n, Ret) and n.value == (VInt(1), VInt(2))


def test_gpar_sync_trace():
    p = vis({A: skip()})
    q = vis({A: skip()})
    g = gpar(p, events_of(A), q)
    n = g.force()
    assert list(n.choices.keys()) == [A]
    after = n.choices[A].force()
    assert isinstance(after, Ret) and after.value == (UNIT, UNIT)


def test_gpar_div_annihilates():
    for p in corpus(10):
        assert weak_bisim_to_depth(gpar(div(), EMPTY_EVENTS, p), div(), depth=32).is_true


def test_gpar_swap_commutativity():
    rng = random.Random(17)
    corp = corpus(30)
    for _ in range(25):
        p, q = rng.choice(corp), rng.choice(corp)
        E = events_of(A)
        swapped = bind(gpar(q, E, p), lambda xy: ret((xy[1], xy[0])))
        assert bisim_to_depth(gpar(p, E, q), swapped, depth=32).passes


def test_cpar_interleave_commutative_and_skip_unit():
    rng = random.Random(19)
    corp = unit_corpus(30)
    for _ in range(25):
        p, q = rng.choice(corp), rng.choice(corp)
        assert bisim_to_depth(cpar(p, events_of(A), q), cpar(q, events_of(A), p), depth=32).passes
        assert bisim_to_depth(interleave(p, q), interleave(q, p), depth=32).passes
    for p in corp:
        assert weak_bisim_to_depth(interleave(skip(), p), p, depth=32).passes


def test_interleave_traces_are_interleavings():
    p = vis({A: skip()})
    q = vis({B: skip()})
    trs = {t for t in traces(interleave(p, q), 2)}
    assert (A, B) in trs and (B, A) in trs
    assert (A, A) not in trs


def test_vis_domains_stay_distinct_on_operator_results():
    rng = random.Random(23)
    corp = corpus(20)
    for _ in range(20):
        p, q = rng.choice(corp), rng.choice(corp)
        for t in (extchoice(p, q), gpar(p, events_of(A), q), hide(p, events_of(A))):
            n = t.force()
            if isinstance(n, Vis):
                ks = list(n.choices.keys())
                assert len(ks) == len(set(ks))


# -- hiding -----------------------------------------------------------------------


def test_hide_single_event_becomes_tau():
    P, Q = vis({C: stop()}), skip()
    t = vis({A: P, B: Q})
    h = hide(t, events_of(A)).force()
    assert isinstance(h, Sil)
    assert bisim_to_depth(h.child, hide(P, events_of(A)), depth=16).is_true


def test_hide_ret_passthrough():
    assert hide(ret(VInt(5)), events_of(A)).force().value == VInt(5)


def test_hide_none_enabled_keeps_menu():
    t = vis({A: stop(), B: stop()})
    h = hide(t, events_of(C)).force()
    assert isinstance(h, Vis)
    assert set(h.choices.dom()) == {A, B}


def test_hide_two_enabled_deadlocks(caplog):
    import logging

    t = vis({A: stop(), B: stop()})
    with caplog.at_level(logging.INFO, logger="itreesim.csp"):
        h = hide(t, events_of(A, B)).force()
    assert isinstance(h, Vis) and h.choices.is_empty()
    assert any("hiding deadlock" in r.message for r in caplog.records)


def test_gpar_ret_vis_pushes_return_through():
    # the lone return is retained while the other side moves, even on
    # events in the synchronization set (literal equation)
    q = vis({A: skip()})
    g = gpar(ret(VInt(7)), events_of(A), q).force()
    assert isinstance(g, Vis)
    assert list(g.choices.keys()) == [A]
    after = g.choices[A].force()
    assert isinstance(after, Ret) and after.value == (VInt(7), UNIT)


def test_hide_introduces_divergence():
    t = hide(iter_(sync(E0)), channels_of("e"))
    r = stabilises_within(t, 1000)
    assert not isinstance(r, Ret)
    from itreesim.itree import FuelExhausted

    assert isinstance(r, FuelExhausted)
    assert weak_bisim_to_depth(t, div()).is_true
