import pytest
from hypothesis import given, strategies as st

from hoig.errors import KindMismatch, NotClosedReplacement, UnboundSymbol
from hoig.kinds import (
    GROUND, Arrow, app, arrow, kind_of, lam, nonterminal, show, spine, substitute, terminal, var,
)

O = GROUND
O1 = arrow(O, O)


def kinds(depth=3):
    return st.recursive(st.just(O), lambda k: st.builds(Arrow, k, k), max_leaves=depth + 2)


def test_arity_order_examples():
    assert (O.arity, O.order) == (0, 0)
    assert (O1.arity, O1.order) == (1, 1)
    h = arrow(O1, O, O)
    assert (h.arity, h.order) == (2, 2)
    assert repr(h) == "(o -> o) -> o -> o"


@given(kinds(), kinds())
def test_arrow_recurrences(k1, k2):
    k = Arrow(k1, k2)
    assert k.arity == k2.arity + 1
    assert k.order == max(k1.order + 1, k2.order)
    assert arrow(*k.args(), O) == k


def test_terms_are_interned():
    a = terminal("a", O1)
    e = terminal("e", O)
    assert app(a, e) is app(a, e)
    assert lam("x", O, app(a, var("x", O))) is lam("x", O, app(a, var("x", O)))


def test_application_checks_kinds():
    a = terminal("a", O1)
    e = terminal("e", O)
    with pytest.raises(KindMismatch):
        app(e, e)
    with pytest.raises(KindMismatch):
        app(a, a)


def test_kind_of_with_context():
    a = terminal("a", O1)
    t = app(a, var("x", O))
    assert kind_of(t, {"a": O1, "x": O}) is O
    with pytest.raises(UnboundSymbol):
        kind_of(t, {"a": O1})
    with pytest.raises(KindMismatch):
        kind_of(t, {"a": O1, "x": O1})


def test_substitute_and_shadowing():
    a = terminal("a", O1)
    e = terminal("e", O)
    x = var("x", O)
    t = app(a, x)
    assert substitute(t, {"x": e}) is app(a, e)
    shadow = lam("x", O, app(a, x))
    assert substitute(shadow, {"x": e}) is shadow
    with pytest.raises(NotClosedReplacement):
        substitute(t, {"x": var("y", O)})
    with pytest.raises(KindMismatch):
        substitute(t, {"x": a})


def test_spine_and_show():
    h = nonterminal("H", arrow(O1, O, O))
    a = terminal("a", O1)
    e = terminal("e", O)
    t = app(h, app(h, a), e)
    head, args = spine(t)
    assert head is h and args == [app(h, a), e]
    assert show(t) == "H (H a) e"
