"""Kinds (simple types over the single ground kind ``o``) and kinded terms.

Terms are hash-consed: every constructor goes through an intern table, so two
structurally equal terms are the same object and ``is``/``==`` are O(1).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Mapping

from .errors import KindMismatch, NotClosedReplacement, UnboundSymbol


class Kind:
    __slots__ = ()

    @property
    def arity(self) -> int:
        return 0

    @property
    def order(self) -> int:
        return 0

    def args(self) -> tuple[Kind, ...]:
        """Argument kinds ``(k1, ..., kn)`` of ``k1 -> ... -> kn -> o``."""
        out = []
        k = self
        while isinstance(k, Arrow):
            out.append(k.left)
            k = k.right
        return tuple(out)


class _Ground(Kind):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "o"

    def __reduce__(self):
        return (_Ground, ())


GROUND = _Ground()


@dataclass(frozen=True, slots=True)
class Arrow(Kind):
    left: Kind
    right: Kind

    @property
    def arity(self) -> int:
        return self.right.arity + 1

    @property
    def order(self) -> int:
        return max(self.left.order + 1, self.right.order)

    def __repr__(self):
        left = f"({self.left!r})" if isinstance(self.left, Arrow) else repr(self.left)
        return f"{left} -> {self.right!r}"


def arrow(*kinds: Kind) -> Kind:
    """``arrow(k1, k2, k3)`` is ``k1 -> (k2 -> k3)``."""
    result = kinds[-1]
    for k in reversed(kinds[:-1]):
        result = Arrow(k, result)
    return result


def arity_order(kind: Kind) -> tuple[int, int]:
    return kind.arity, kind.order


# -- terms -----------------------------------------------------------------

_intern_lock = threading.Lock()
_intern: dict[tuple, Term] = {}


class Term:
    """Base class of kinded terms. Instances are interned; never construct directly."""

    __slots__ = ("kind", "free_vars", "has_lambda", "__weakref__")
    kind: Kind
    free_vars: frozenset
    has_lambda: bool

    def __repr__(self):
        return show(self)

    @property
    def closed(self) -> bool:
        return not self.free_vars


class Symbol(Term):
    __slots__ = ("name",)
    name: str


class Terminal(Symbol):
    __slots__ = ()


class NonTerminal(Symbol):
    __slots__ = ()


class Var(Symbol):
    __slots__ = ()


class App(Term):
    __slots__ = ("fun", "arg")
    fun: Term
    arg: Term


class Lam(Term):
    __slots__ = ("var", "var_kind", "body")
    var: str
    var_kind: Kind
    body: Term


def _interned(key, build):
    t = _intern.get(key)
    if t is not None:
        return t
    with _intern_lock:
        t = _intern.get(key)
        if t is None:
            t = build()
            _intern[key] = t
    return t


def _symbol(cls, name: str, kind: Kind):
    def build():
        t = object.__new__(cls)
        t.name = name
        t.kind = kind
        t.free_vars = frozenset({(name, kind)}) if cls is Var else frozenset()
        t.has_lambda = False
        return t
    return _interned((cls, name, kind), build)


def terminal(name: str, kind: Kind) -> Terminal:
    return _symbol(Terminal, name, kind)


def nonterminal(name: str, kind: Kind) -> NonTerminal:
    return _symbol(NonTerminal, name, kind)


def var(name: str, kind: Kind) -> Var:
    return _symbol(Var, name, kind)


def app(fun: Term, *args: Term) -> Term:
    """Left-nested application ``fun a1 ... an``; checks kinds."""
    for a in args:
        fk = fun.kind
        if not isinstance(fk, Arrow):
            raise KindMismatch(f"cannot apply {show(fun)} of ground kind to {show(a)}")
        if fk.left != a.kind:
            raise KindMismatch(f"{show(fun)} expects {fk.left!r}, got {show(a)} : {a.kind!r}")

        def build(f=fun, x=a, k=fk.right):
            t = object.__new__(App)
            t.fun = f
            t.arg = x
            t.kind = k
            t.free_vars = f.free_vars | x.free_vars
            t.has_lambda = f.has_lambda or x.has_lambda
            return t
        fun = _interned((App, id(fun), id(a)), build)
    return fun


def lam(name: str, kind: Kind, body: Term) -> Lam:
    def build():
        t = object.__new__(Lam)
        t.var = name
        t.var_kind = kind
        t.body = body
        t.kind = Arrow(kind, body.kind)
        t.free_vars = body.free_vars - {(name, kind)}
        t.has_lambda = True
        return t
    return _interned((Lam, name, kind, id(body)), build)


def lams(params, body: Term) -> Term:
    for name, kind in reversed(list(params)):
        body = lam(name, kind, body)
    return body


def spine(term: Term) -> tuple[Term, list[Term]]:
    """Split ``h t1 ... tn`` into ``(h, [t1, ..., tn])``."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fun
    args.reverse()
    return term, args


# -- operations ------------------------------------------------------------

def kind_of(term: Term, context: Mapping[str, Kind] | None = None) -> Kind:
    """Recompute the kind of ``term`` from the kinds of its symbols.

    With a ``context``, every free symbol must be bound there and agree with
    its annotation; lambda binders extend the context.
    """
    if context is None:
        context = {}
        check = False
    else:
        check = True

    def go(t, ctx):
        if isinstance(t, Symbol):
            if not check:
                return t.kind
            if t.name not in ctx:
                raise UnboundSymbol(f"unbound symbol {t.name}")
            if ctx[t.name] != t.kind:
                raise KindMismatch(f"{t.name} has kind {ctx[t.name]!r}, annotated {t.kind!r}")
            return ctx[t.name]
        if isinstance(t, App):
            fk = go(t.fun, ctx)
            ak = go(t.arg, ctx)
            if not isinstance(fk, Arrow):
                raise KindMismatch(f"application of non-arrow {show(t.fun)}")
            if fk.left != ak:
                raise KindMismatch(f"argument kind {ak!r} does not match {fk.left!r} in {show(t)}")
            return fk.right
        if isinstance(t, Lam):
            inner = dict(ctx)
            inner[t.var] = t.var_kind
            return Arrow(t.var_kind, go(t.body, inner))
        raise TypeError(t)

    return go(term, context)


def substitute(term: Term, bindings: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of closed terms for free variables.

    Replacements must be variable-closed, so no capture can happen.
    """
    for name, rep in bindings.items():
        if rep.free_vars:
            raise NotClosedReplacement(f"replacement for {name} has free variables {sorted(n for n, _ in rep.free_vars)}")
    if not bindings:
        return term
    cache: dict[tuple[int, frozenset], Term] = {}

    def go(t, active):
        if not t.free_vars:
            return t
        if isinstance(t, Var):
            rep = active.get(t.name)
            if rep is None:
                return t
            if rep.kind != t.kind:
                raise KindMismatch(f"{t.name} : {t.kind!r} bound to term of kind {rep.kind!r}")
            return rep
        key = (id(t), frozenset(active))
        hit = cache.get(key)
        if hit is not None:
            return hit
        if isinstance(t, App):
            out = app(go(t.fun, active), go(t.arg, active))
        elif isinstance(t, Lam):
            if t.var in active:
                active = {k: v for k, v in active.items() if k != t.var}
            out = lam(t.var, t.var_kind, go(t.body, active)) if active else t
        else:
            out = t
        cache[key] = out
        return out

    return go(term, dict(bindings))


def show(term: Term) -> str:
    """Render in the scheme file's surface syntax."""
    if isinstance(term, Symbol):
        return term.name
    if isinstance(term, Lam):
        return f"\\{term.var}:{_kind_src(term.var_kind)}. {show(term.body)}"
    head, args = spine(term)
    parts = [show(head) if not isinstance(head, Lam) else f"({show(head)})"]
    for a in args:
        s = show(a)
        parts.append(s if isinstance(a, Symbol) else f"({s})")
    return " ".join(parts)


def _kind_src(kind: Kind) -> str:
    return f"({kind!r})" if isinstance(kind, Arrow) else repr(kind)
