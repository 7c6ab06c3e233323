"""Positive Boolean formulas in canonical antichain CNF.

A formula is a set of clauses; a clause is an ``int`` bitmask of atom indices
read as a disjunction, and the set is read as a conjunction. The canonical
form keeps only the subset-minimal clauses. ``true`` has no clauses and
``false`` is the single empty clause.
"""
from __future__ import annotations

import threading
from typing import Callable, Iterable, Sequence

from .errors import PartialAtomMap, UniverseMismatch


class AtomUniverse:
    """A finite, densely indexed set of atomic propositions.

    ``kind`` is ``"states"`` (atoms are NFA states) or ``"statesets"`` (atoms
    are members of ``Acc(T*)``, given as state bitmasks in ``members``).
    """

    def __init__(self, kind: str, names: Sequence[str], members: Sequence[int] | None = None):
        if len(set(names)) != len(names):
            raise ValueError("atoms must be distinct")
        self.kind = kind
        self.names = tuple(names)
        self.members = tuple(members) if members is not None else None
        self._interned: dict[frozenset, Formula] = {}
        self._lock = threading.Lock()
        self.TRUE = self.make(())
        self.FALSE = self.make((0,))

    @classmethod
    def of_states(cls, nfa) -> AtomUniverse:
        return cls("states", nfa.states)

    @classmethod
    def of_statesets(cls, nfa, sets: Sequence[int]) -> AtomUniverse:
        return cls("statesets", [nfa.show_set(s) for s in sets], sets)

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"AtomUniverse({self.kind}, {list(self.names)})"

    def index_of_member(self, member: int) -> int:
        return self.members.index(member)

    def make(self, clauses: Iterable[int]) -> Formula:
        """Canonical formula from an arbitrary clause collection."""
        return self._intern(_minimize(clauses))

    def _intern(self, clauses: frozenset) -> Formula:
        f = self._interned.get(clauses)
        if f is None:
            with self._lock:
                f = self._interned.get(clauses)
                if f is None:
                    f = Formula(self, clauses)
                    self._interned[clauses] = f
        return f

    def atom(self, i: int) -> Formula:
        return self.make((1 << i,))

    def any_of(self, mask: int) -> Formula:
        """The disjunction of the atoms in ``mask`` (``false`` when empty)."""
        return self.make((mask,))

    def all_of(self, mask: int) -> Formula:
        return self.make(1 << i for i in range(len(self.names)) if mask >> i & 1)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.names)) - 1


def _minimize(clauses: Iterable[int]) -> frozenset:
    cs = sorted(set(clauses), key=lambda c: (c.bit_count(), c))
    kept: list[int] = []
    for c in cs:
        for k in kept:
            if k & ~c == 0:
                break
        else:
            kept.append(c)
    return frozenset(kept)


class Formula:
    """Interned canonical formula; compare with ``is`` or ``==`` (identity)."""

    __slots__ = ("universe", "clauses", "__weakref__")

    def __init__(self, universe: AtomUniverse, clauses: frozenset):
        self.universe = universe
        self.clauses = clauses

    @property
    def is_true(self) -> bool:
        return not self.clauses

    @property
    def is_false(self) -> bool:
        return 0 in self.clauses

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __le__(self, other):
        return implies(self, other)

    def __repr__(self):
        return render(self)

    def __reduce__(self):
        raise TypeError("formulas are interned per universe and are not picklable")


def _same(f: Formula, g: Formula):
    if f.universe is not g.universe:
        raise UniverseMismatch("formulas over different atom universes")


def conj(f: Formula, g: Formula) -> Formula:
    _same(f, g)
    if f.is_true or g.is_false:
        return g
    if g.is_true or f.is_false:
        return f
    return f.universe.make(f.clauses | g.clauses)


def disj(f: Formula, g: Formula) -> Formula:
    _same(f, g)
    if f.is_false or g.is_true:
        return g
    if g.is_false or f.is_true:
        return f
    return f.universe.make(c | d for c in f.clauses for d in g.clauses)


def conj_all(universe: AtomUniverse, fs: Iterable[Formula]) -> Formula:
    out = universe.TRUE
    for f in fs:
        out = conj(out, f)
    return out


def disj_all(universe: AtomUniverse, fs: Iterable[Formula]) -> Formula:
    out = universe.FALSE
    for f in fs:
        out = disj(out, f)
    return out


def implies(f: Formula, g: Formula) -> bool:
    """Every clause of ``g`` is subsumed by some clause of ``f``."""
    _same(f, g)
    if f is g:
        return True
    fc = f.clauses
    for c in g.clauses:
        for d in fc:
            if d & ~c == 0:
                break
        else:
            return False
    return True


def satisfied_by(f: Formula, assignment: int) -> bool:
    """``assignment`` is the bitmask of true atoms."""
    for c in f.clauses:
        if not c & assignment:
            return False
    return True


def map_atoms(f: Formula, h: Callable[[int], Formula] | Sequence[Formula], target: AtomUniverse) -> Formula:
    """Replace each atom ``i`` by ``h(i)`` and distribute over the Boolean structure."""
    get = h.__getitem__ if isinstance(h, (list, tuple, dict)) else h
    out = target.TRUE
    for c in f.clauses:
        clause = target.FALSE
        i = 0
        while c:
            if c & 1:
                try:
                    img = get(i)
                except (KeyError, IndexError) as exc:
                    raise PartialAtomMap(f"no image for atom {f.universe.names[i]}") from exc
                if img.universe is not target:
                    raise UniverseMismatch("atom image lives in a different universe")
                clause = disj(clause, img)
                if clause.is_true:
                    break
            c >>= 1
            i += 1
        out = conj(out, clause)
        if out.is_false:
            break
    return out


def map_clauses(f: Formula, h: Callable[[int], int], target: AtomUniverse) -> Formula:
    """Fast path of ``map_atoms`` when every atom goes to a disjunction of target atoms.

    ``h`` maps a whole clause mask to the target clause mask; it must be a
    union homomorphism (``h(c | d) == h(c) | h(d)``).
    """
    return target.make(h(c) for c in f.clauses)


def render(f: Formula) -> str:
    if f.is_true:
        return "true"
    if f.is_false:
        return "false"
    names = f.universe.names
    parts = []
    for c in sorted(f.clauses, key=lambda c: (c.bit_count(), _bits(c))):
        atoms = [names[i] for i in _bits(c)]
        if len(atoms) == 1:
            parts.append(atoms[0])
        else:
            parts.append("(" + " | ".join(atoms) + ")")
    if len(parts) == 1 and parts[0].startswith("("):
        return parts[0][1:-1]
    return " & ".join(parts)


def _bits(c: int) -> list[int]:
    out = []
    i = 0
    while c:
        if c & 1:
            out.append(i)
        c >>= 1
        i += 1
    return out
