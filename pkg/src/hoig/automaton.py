"""Nondeterministic finite automata with bitset state sets.

A ``StateSet`` is a plain ``int`` bitmask over the densely indexed states.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import UnknownLetter, ValidationError

StateSet = int


@dataclass(frozen=True)
class NFA:
    states: tuple[str, ...]
    alphabet: frozenset[str]
    transitions: frozenset[tuple[str, str, str]]
    initial: str
    finals: frozenset[str]
    _index: dict = field(init=False, repr=False, compare=False)
    _pred: dict = field(init=False, repr=False, compare=False)
    _succ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise ValidationError("duplicate state names")
        index = {q: i for i, q in enumerate(self.states)}
        if self.initial not in index:
            raise ValidationError(f"initial state {self.initial} is not declared")
        for q in self.finals:
            if q not in index:
                raise ValidationError(f"final state {q} is not declared")
        pred = {a: [0] * len(self.states) for a in self.alphabet}
        succ = {a: [0] * len(self.states) for a in self.alphabet}
        for p, a, q in self.transitions:
            if p not in index or q not in index:
                raise ValidationError(f"transition {p} {a} {q} uses an undeclared state")
            if a not in self.alphabet:
                raise UnknownLetter(f"transition {p} {a} {q} uses unknown letter {a}")
            pred[a][index[q]] |= 1 << index[p]
            succ[a][index[p]] |= 1 << index[q]
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_pred", pred)
        object.__setattr__(self, "_succ", succ)

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def q0(self) -> StateSet:
        return 1 << self._index[self.initial]

    @property
    def final_set(self) -> StateSet:
        return self.mask(self.finals)

    @property
    def all_states(self) -> StateSet:
        return (1 << len(self.states)) - 1

    def index(self, state: str) -> int:
        return self._index[state]

    def mask(self, states: Iterable[str]) -> StateSet:
        m = 0
        for q in states:
            m |= 1 << self._index[q]
        return m

    def members(self, s: StateSet) -> list[str]:
        return [q for i, q in enumerate(self.states) if s >> i & 1]

    def show_set(self, s: StateSet) -> str:
        return "{" + ",".join(self.members(s)) + "}"

    def letters(self) -> list[str]:
        return sorted(self.alphabet)

    def _check(self, letter):
        if letter not in self.alphabet:
            raise UnknownLetter(f"letter {letter!r} is not in the alphabet")

    def pre(self, letter: str, target: StateSet) -> StateSet:
        """States with an ``letter``-transition into ``target``."""
        self._check(letter)
        table = self._pred[letter]
        out = 0
        i = 0
        while target:
            if target & 1:
                out |= table[i]
            target >>= 1
            i += 1
        return out

    def post(self, letter: str, source: StateSet) -> StateSet:
        self._check(letter)
        table = self._succ[letter]
        out = 0
        i = 0
        while source:
            if source & 1:
                out |= table[i]
            source >>= 1
            i += 1
        return out

    def run(self, word: Sequence[str], start: StateSet | None = None) -> StateSet:
        """Forward state set reached from ``start`` (default: the initial state)."""
        s = self.q0 if start is None else start
        for a in word:
            s = self.post(a, s)
        return s

    def accepts(self, word: Sequence[str]) -> bool:
        return bool(self.run(word) & self.final_set)

    def acc_of_word(self, word: Sequence[str]) -> StateSet:
        """States from which ``word`` is accepted."""
        s = self.final_set
        for a in reversed(word):
            s = self.pre(a, s)
        return s

    def acc_closure(self) -> list[StateSet]:
        return [s for s, _ in self.acc_witnesses()]

    def acc_witnesses(self) -> list[tuple[StateSet, tuple[str, ...]]]:
        """All sets ``Acc(w)``, in BFS order from ``Acc(eps)``, each with a shortest witness ``w``."""
        start = self.final_set
        seen = {start: ()}
        order = [start]
        queue = deque([start])
        letters = self.letters()
        while queue:
            s = queue.popleft()
            w = seen[s]
            for a in letters:
                t = self.pre(a, s)
                if t not in seen:
                    seen[t] = (a,) + w
                    order.append(t)
                    queue.append(t)
        return [(s, seen[s]) for s in order]

    def with_alphabet(self, alphabet: Iterable[str]) -> NFA:
        return NFA(self.states, frozenset(alphabet), self.transitions, self.initial, self.finals)


def accepts(nfa: NFA, word: Sequence[str]) -> bool:
    return nfa.accepts(word)


def pre(nfa: NFA, letter: str, target: StateSet) -> StateSet:
    return nfa.pre(letter, target)


def acc_closure(nfa: NFA) -> list[StateSet]:
    return nfa.acc_closure()


def acc_of_word(nfa: NFA, word: Sequence[str]) -> StateSet:
    return nfa.acc_of_word(word)


def parse_nfa(text: str, alphabet: Iterable[str] | None = None) -> NFA:
    """Parse the NFA file format (``states``, ``initial``, ``final``, ``trans`` statements).

    Without an explicit ``alphabet`` the letters used by transitions are taken.
    """
    from .scheme import Lexer

    lex = Lexer(text)
    states: list[str] | None = None
    initial = None
    finals: list[str] | None = None
    trans = []
    while not lex.at_end():
        tok = lex.expect_ident()
        if tok.text == "states":
            if states is not None:
                lex.fail("duplicate states declaration", tok)
            states = lex.idents_until_semi()
        elif tok.text == "initial":
            names = lex.idents_until_semi()
            if len(names) != 1 or initial is not None:
                lex.fail("exactly one initial state expected", tok)
            initial = names[0]
        elif tok.text == "final":
            if finals is not None:
                lex.fail("duplicate final declaration", tok)
            finals = lex.idents_until_semi()
        elif tok.text == "trans":
            names = lex.idents_until_semi()
            if len(names) != 3:
                lex.fail("transition needs: source letter target", tok)
            trans.append(tuple(names))
        else:
            lex.fail(f"unexpected keyword {tok.text!r}", tok)
    if states is None or initial is None:
        raise ValidationError("NFA needs a states and an initial declaration")
    letters = {a for _, a, _ in trans}
    if alphabet is not None:
        alphabet = frozenset(alphabet)
        unknown = letters - alphabet
        if unknown:
            raise UnknownLetter(f"transitions over unknown letters {sorted(unknown)}")
    else:
        alphabet = frozenset(letters)
    return NFA(tuple(states), alphabet, frozenset(trans), initial, frozenset(finals or ()))


def format_nfa(nfa: NFA) -> str:
    lines = [f"states {' '.join(nfa.states)};", f"initial {nfa.initial};"]
    finals = [q for q in nfa.states if q in nfa.finals]
    lines.append(f"final {' '.join(finals)};".replace(" ;", ";"))
    for p, a, q in sorted(nfa.transitions, key=lambda t: (nfa.index(t[0]), t[1], nfa.index(t[2]))):
        lines.append(f"trans {p} {a} {q};")
    return "\n".join(lines) + "\n"
