"""Finite semantic domains of the abstract and optimized models.

Ground values are interned ``Formula`` objects. Values of arrow kind are
``FuncValue`` objects: a lazily filled table from argument keys to results.
Two values of the same kind are equal iff their keys are equal, where the
key of a function is the tuple of result keys over the enumerated argument
domain (interned to a small int).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .automaton import NFA
from .errors import DomainTooLarge, InvariantViolation, KindMismatch
from .formula import AtomUniverse, Formula, conj, conj_all, disj, disj_all, implies, map_clauses
from .kinds import GROUND, Arrow, Kind, arrow
from .scheme import GameInstance, op_name

DEFAULT_CAP = 10_000


class FuncValue:
    __slots__ = ("arg_kind", "res_kind", "fn", "memo", "key", "label")

    def __init__(self, arg_kind: Kind, res_kind: Kind, fn: Callable | None, memo=None, label=None):
        self.arg_kind = arg_kind
        self.res_kind = res_kind
        self.fn = fn
        self.memo = {} if memo is None else memo
        self.key = None
        self.label = label

    @property
    def kind(self) -> Kind:
        return Arrow(self.arg_kind, self.res_kind)

    def __repr__(self):
        return f"<{self.label or 'fun'} : {self.kind!r}>"


Value = Union[Formula, FuncValue]


def kind_of_value(v: Value) -> Kind:
    return GROUND if isinstance(v, Formula) else v.kind


@dataclass
class DomainEnumeration:
    kind: Kind
    elements: list
    index: dict = field(repr=False)
    _up: list | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.elements)


class Model:
    """A finite model: ground lattice over ``universe`` plus terminal interpretations.

    ``name`` is ``"abstract"`` (atoms are the sets in ``Acc(T*)``) or
    ``"optimized"`` (atoms are NFA states).
    """

    def __init__(self, name: str, game: GameInstance, cap: int = DEFAULT_CAP):
        if name not in ("abstract", "optimized"):
            raise ValueError(f"unknown model {name!r}")
        self.name = name
        self.game = game
        self.nfa: NFA = game.nfa
        self.cap = cap
        self.acc_sets = self.nfa.acc_closure()
        if name == "abstract":
            self.universe = AtomUniverse.of_statesets(self.nfa, self.acc_sets)
        else:
            self.universe = AtomUniverse.of_states(self.nfa)
        self.TRUE = self.universe.TRUE
        self.FALSE = self.universe.FALSE
        self._enums: dict[Kind, DomainEnumeration] = {}
        self._refused: dict[Kind, DomainTooLarge] = {}
        self._keyids: dict[Kind, dict[tuple, int]] = {}
        self._tops: dict[Kind, Value] = {}
        self.interp: dict[str, Value] = {}
        self._build_interpretation()

    def __repr__(self):
        return f"Model({self.name}, atoms={list(self.universe.names)})"

    # -- interpretation ----------------------------------------------------

    def _build_interpretation(self):
        nfa = self.nfa
        scheme = self.game.scheme
        if self.name == "abstract":
            pos = {s: i for i, s in enumerate(self.acc_sets)}
            self.interp[scheme.end] = self.universe.atom(pos[nfa.final_set])
            for a in scheme.letters:
                img = [pos[nfa.pre(a, s)] for s in self.acc_sets]
                self.interp[a] = self._letter(a, _clause_map(img))
        else:
            self.interp[scheme.end] = self.universe.any_of(nfa.final_set)
            for a in scheme.letters:
                self.interp[a] = self._letter(a, lambda c, a=a: nfa.pre(a, c))
        for f, rules in scheme.rules.items():
            combine = disj_all if self.game.owner(f) == "E" else conj_all
            self.interp[op_name(f)] = self._op(op_name(f), len(rules), combine)

    def _letter(self, a, clause_image):
        u = self.universe
        return FuncValue(GROUND, GROUND, lambda phi: map_clauses(phi, clause_image, u), label=a)

    def _op(self, name, ell, combine):
        u = self.universe

        def collect(done, remaining):
            if remaining == 0:
                return combine(u, done)
            return FuncValue(GROUND, arrow(*([GROUND] * remaining)),
                             lambda d: collect(done + (d,), remaining - 1), label=name)
        return collect((), ell)

    def ground_generators(self) -> list[Formula]:
        u = self.universe
        if self.name == "abstract":
            gens = [u.atom(i) for i in range(len(u))]
        else:
            gens = [u.any_of(s) for s in self.acc_sets]
        return [self.TRUE] + gens

    def winning_assignment(self) -> int:
        """Atoms that hold when the play starts in the initial state."""
        q0 = self.nfa.q0
        if self.name == "optimized":
            return q0
        m = 0
        for i, s in enumerate(self.acc_sets):
            if s & q0:
                m |= 1 << i
        return m

    # -- enumeration -------------------------------------------------------

    def enumerate_domain(self, kind: Kind) -> DomainEnumeration:
        e = self._enums.get(kind)
        if e is None:
            if kind in self._refused:
                raise self._refused[kind]
            try:
                e = self._enum_ground() if kind is GROUND else self._enum_arrow(kind)
            except DomainTooLarge as exc:
                self._refused[kind] = exc
                raise
            self._enums[kind] = e
        return e

    def _enum_ground(self) -> DomainEnumeration:
        elems = list(dict.fromkeys(self.ground_generators()))
        seen = set(elems)
        i = 0
        while i < len(elems):
            a = elems[i]
            for j in range(i + 1):
                b = elems[j]
                for c in (conj(a, b), disj(a, b)):
                    if c not in seen:
                        seen.add(c)
                        elems.append(c)
                        if len(elems) > self.cap:
                            raise DomainTooLarge(self.cap, len(elems), GROUND)
            i += 1
        return DomainEnumeration(GROUND, elems, {f: k for k, f in enumerate(elems)})

    def _up_masks(self, e: DomainEnumeration) -> list[int]:
        """``up[i]`` has bit ``j`` set iff element i <= element j."""
        if e._up is None:
            n = len(e.elements)
            up = [0] * n
            for i in range(n):
                for j in range(n):
                    if self.leq_value(e.elements[i], e.elements[j]):
                        up[i] |= 1 << j
            e._up = up
        return e._up

    def _enum_arrow(self, kind: Arrow) -> DomainEnumeration:
        dom = self.enumerate_domain(kind.left)
        cod = self.enumerate_domain(kind.right)
        up_d = self._up_masks(dom)
        up_c = self._up_masks(cod)
        n = len(dom)
        # linear extension of the argument order: fewer elements below first
        below = [sum(1 for j in range(n) if up_d[j] >> i & 1) for i in range(n)]
        order = sorted(range(n), key=lambda i: below[i])
        covers = []
        for i in order:
            lower = [j for j in range(n) if j != i and up_d[j] >> i & 1]
            covers.append([j for j in lower if not any(k != j and up_d[j] >> k & 1 and k in lower for k in lower)])
        full = (1 << len(cod)) - 1
        tables: list[list[int]] = []
        assign = [0] * n

        def rec(pos):
            if pos == n:
                tables.append(list(assign))
                if len(tables) > self.cap:
                    raise DomainTooLarge(self.cap, len(tables), kind)
                return
            i = order[pos]
            cand = full
            for j in covers[pos]:
                cand &= up_c[assign[j]]
            v = 0
            while cand:
                if cand & 1:
                    assign[i] = v
                    rec(pos + 1)
                cand >>= 1
                v += 1

        rec(0)
        keys = [self.key(d) for d in dom.elements]
        elems = []
        for t in tables:
            memo = {k: cod.elements[v] for k, v in zip(keys, t)}
            f = FuncValue(kind.left, kind.right, None, memo, label="table")
            f.key = self._intern_key(kind, tuple(self.key(cod.elements[v]) for v in t))
            elems.append(f)
        return DomainEnumeration(kind, elems, {f.key: k for k, f in enumerate(elems)})

    # -- values ------------------------------------------------------------

    def _intern_key(self, kind, tup):
        ids = self._keyids.setdefault(kind, {})
        k = ids.get(tup)
        if k is None:
            k = len(ids)
            ids[tup] = k
        return k

    def key(self, v: Value):
        if isinstance(v, Formula):
            return v
        if v.key is None:
            dom = self.enumerate_domain(v.arg_kind)
            v.key = self._intern_key(v.kind, tuple(self.key(self.apply_value(v, d)) for d in dom.elements))
        return v.key

    def apply_value(self, f: Value, arg: Value) -> Value:
        if not isinstance(f, FuncValue):
            raise KindMismatch("cannot apply a ground value")
        k = self.key(arg)
        r = f.memo.get(k)
        if r is None:
            if f.fn is None:
                raise InvariantViolation(f"argument outside the tabulated domain of {f!r}")
            r = f.fn(arg)
            f.memo[k] = r
        return r

    def apply_all(self, f: Value, *args: Value) -> Value:
        for a in args:
            f = self.apply_value(f, a)
        return f

    def top_value(self, kind: Kind) -> Value:
        t = self._tops.get(kind)
        if t is None:
            if kind is GROUND:
                t = self.TRUE
            else:
                res = self.top_value(kind.right)
                t = FuncValue(kind.left, kind.right, lambda _d: res, label="top")
            self._tops[kind] = t
        return t

    def meet_value(self, v1: Value, v2: Value) -> Value:
        if isinstance(v1, Formula):
            return conj(v1, v2)
        if v1.kind != kind_of_value(v2):
            raise KindMismatch("meet of values of different kinds")
        return FuncValue(v1.arg_kind, v1.res_kind,
                         lambda d: self.meet_value(self.apply_value(v1, d), self.apply_value(v2, d)), label="meet")

    def leq_witness(self, v1: Value, v2: Value):
        """``None`` if ``v1 <= v2``, else the list of argument ids where it fails."""
        if isinstance(v1, Formula):
            return None if implies(v1, v2) else []
        dom = self.enumerate_domain(v1.arg_kind)
        for i, d in enumerate(dom.elements):
            w = self.leq_witness(self.apply_value(v1, d), self.apply_value(v2, d))
            if w is not None:
                return [i] + w
        return None

    def leq_value(self, v1: Value, v2: Value) -> bool:
        return self.leq_witness(v1, v2) is None

    def eq_value(self, v1: Value, v2: Value) -> bool:
        return self.key(v1) == self.key(v2)

    def is_monotone(self, f: FuncValue) -> bool:
        dom = self.enumerate_domain(f.arg_kind)
        up = self._up_masks(dom)
        res = [self.apply_value(f, d) for d in dom.elements]
        for i in range(len(res)):
            for j in range(len(res)):
                if i != j and up[i] >> j & 1 and not self.leq_value(res[i], res[j]):
                    return False
        return True

    def stats(self) -> dict:
        return {
            "atoms": len(self.universe),
            "acc_sets": len(self.acc_sets),
            "enumerated": {repr(k): len(e) for k, e in self._enums.items()},
        }


def _clause_map(img: list[int]):
    cache = {}

    def h(c):
        r = cache.get(c)
        if r is None:
            r = 0
            i = 0
            x = c
            while x:
                if x & 1:
                    r |= 1 << img[i]
                x >>= 1
                i += 1
            cache[c] = r
        return r
    return h


def abstract_model(game: GameInstance, cap: int = DEFAULT_CAP) -> Model:
    return Model("abstract", game, cap)


def optimized_model(game: GameInstance, cap: int = DEFAULT_CAP) -> Model:
    return Model("optimized", game, cap)


def alpha_formula(abs_model: Model, opt_model: Model, phi: Formula) -> Formula:
    """Resolve each state-set atom ``Q`` into the disjunction of its states."""
    members = abs_model.acc_sets
    return map_clauses(phi, _union_map(members), opt_model.universe)


def _union_map(members):
    def h(c):
        r = 0
        i = 0
        while c:
            if c & 1:
                r |= members[i]
            c >>= 1
            i += 1
        return r
    return h
