"""Prism and lens laws, substitutions, and the value universe."""

import random

import pytest

from itreesim.optics import (
    ChanDecl,
    EMPTY_LENS,
    Registry,
    SchemaError,
    StateSchema,
    Subst,
    T_BOOL,
    T_INT,
    app_expr,
    const_expr,
    field_lens,
    fields_lens,
    lens_indep,
    lens_override,
    prism_of,
    read_expr,
    subst_apply,
    t_list,
    unrestricted,
)
from itreesim.values import (
    Event,
    VBool,
    VInt,
    VList,
    VStr,
    format_value,
    vint,
    vlist,
)

SCHEMA = StateSchema([("x", T_INT), ("y", T_INT), ("flag", T_BOOL)])


def mk_state(x=0, y=0, flag=False):
    return SCHEMA.make(x=vint(x), y=vint(y), flag=VBool(flag))


def random_states(n=25, seed=7):
    rng = random.Random(seed)
    return [mk_state(rng.randrange(10), rng.randrange(10), rng.random() < 0.5) for _ in range(n)]


# -- prisms ------------------------------------------------------------------


def test_prism_build_match():
    c = ChanDecl("Input", T_INT)
    p = prism_of(c)
    assert p.build(vint(3)) == Event("Input", vint(3))
    assert p.match(Event("Input", vint(3))) == vint(3)
    assert p.match(Event("Output", vint(3))) is None


def test_prism_laws_over_domain():
    c = ChanDecl("c", T_INT, enum_domain=tuple(vint(i) for i in range(4)))
    p = prism_of(c)
    for v in c.enum_domain:
        assert p.match(p.build(v)) == v
    e = Event("c", vint(2))
    assert p.build(p.match(e)) == e


def test_prism_build_type_error():
    p = prism_of(ChanDecl("c", T_INT))
    with pytest.raises(SchemaError):
        p.build(VBool(True))


def test_chan_domain_must_match_kind():
    with pytest.raises(SchemaError):
        ChanDecl("c", T_INT, enum_domain=(VBool(True),))


def test_registry_unique_names():
    r = Registry()
    r.declare(ChanDecl("c", T_INT))
    with pytest.raises(SchemaError):
        r.declare(ChanDecl("c", T_BOOL))
    assert r.lookup("c").payload_kind == T_INT
    with pytest.raises(SchemaError):
        r.lookup("nope")


# -- lenses ------------------------------------------------------------------


def test_lens_laws_field():
    x = field_lens("x")
    for s in random_states():
        v, w = vint(41), vint(42)
        assert x.get(x.put(s, v)) == v
        assert x.put(s, x.get(s)) == s
        assert x.put(x.put(s, v), w) == x.put(s, w)


def test_lens_laws_composite():
    xy = fields_lens(["x", "y"])
    for s in random_states():
        v = vlist([vint(1), vint(2)])
        assert xy.get(xy.put(s, v)) == v
        assert xy.put(s, xy.get(s)) == s


def test_lens_indep():
    assert lens_indep(field_lens("x"), field_lens("y"))
    assert not lens_indep(field_lens("x"), field_lens("x"))
    assert not lens_indep(fields_lens(["x", "y"]), field_lens("y"))


def test_indep_implies_put_commute():
    x, y = field_lens("x"), field_lens("y")
    for s in random_states():
        v, w = vint(5), vint(6)
        assert x.put(y.put(s, v), w) == y.put(x.put(s, w), v)


def test_lens_override():
    s1 = mk_state(1, 2)
    s2 = mk_state(9, 8)
    a = field_lens("x")
    out = lens_override(s1, s2, a)
    assert out["x"] == vint(9) and out["y"] == vint(2)
    assert lens_override(s1, s2, EMPTY_LENS) == s1
    full = fields_lens(["x", "y", "flag"])
    assert lens_override(s1, s2, full) == s2


def test_undeclared_field_is_error():
    s = mk_state()
    with pytest.raises(SchemaError):
        s["nope"]
    with pytest.raises(SchemaError):
        lens_override(s, StateSchema([("x", T_INT)]).make(x=vint(0)), field_lens("x"))


# -- expressions and substitutions -------------------------------------------


def inc(e):
    return app_expr(lambda v: vint(v.n + 1), e)


def test_unrestricted():
    x, y = field_lens("x"), field_lens("y")
    e = inc(read_expr(y))  # y + 1
    assert unrestricted(x, e)
    assert not unrestricted(y, e)
    assert not unrestricted(x, inc(read_expr(x)))


def test_unrestricted_implies_put_invariant():
    x = field_lens("x")
    e = inc(read_expr(field_lens("y")))
    for s in random_states():
        assert e.eval(x.put(s, vint(99))) == e.eval(s)


def test_subst_simultaneous():
    x, y = field_lens("x"), field_lens("y")
    sigma = Subst([(x, const_expr(vint(1))), (y, read_expr(x))])
    s = mk_state(0, 9)
    out = subst_apply(sigma, s)
    assert out["x"] == vint(1)
    assert out["y"] == vint(0)  # read the pre-state


def test_subst_identity():
    s = mk_state(3, 4)
    assert subst_apply(Subst(), s) == s


def test_subst_compose_matches_function_composition():
    x, y = field_lens("x"), field_lens("y")
    sigma = Subst([(x, inc(read_expr(x)))])
    rho = Subst([(y, read_expr(x))])
    for s in random_states():
        assert subst_apply(rho, subst_apply(sigma, s)) == rho(sigma(s))


# -- values ------------------------------------------------------------------


def test_value_formatting():
    assert format_value(vlist([vint(1), vint(2)])) == "[1,2]"
    assert format_value(VStr('a"b')) == '"a\\"b"'
    assert str(Event("State", vlist([vint(1)]))) == "State.[1]"
    assert str(Event("go")) == "go"


def test_list_type_matches():
    t = t_list(T_INT)
    assert t.matches(vlist([vint(1)]))
    assert not t.matches(vlist([VBool(True)]))
    assert not t.matches(vint(1))


def test_value_json_round_trip():
    from itreesim.values import (
        UNIT,
        VEnum,
        VPair,
        event_from_json,
        event_to_json,
        value_from_json,
        value_to_json,
    )

    samples = [
        UNIT,
        vint(-3),
        VBool(True),
        VStr("hi\n"),
        vlist([vint(1), vlist([])]),
        VPair(vint(1), VEnum("Red")),
    ]
    for v in samples:
        assert value_from_json(value_to_json(v)) == v
    e = Event("wrt", VPair(vint(0), vint(3)))
    assert event_from_json(event_to_json(e)) == e
