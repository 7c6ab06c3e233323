"""Outermost-innermost plays, Player E's strategy read off the solution, and brute-force oracles.

Every game term reachable from the start symbol of a word-generating scheme
is a stack of unary letters over either the end marker or a redex ``F t1..tm``.
A ``PlayState`` stores that decomposition. Whether a prefix-wrapped term is
still good for E depends on the prefix only through the set of NFA states
reached by reading it, which is what the oracles key on.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .domain import Model
from .errors import BadRuleIndex, NoSatisfyingChoice, NotARedex, StrategyRefuted
from .formula import Formula, render, satisfied_by
from .kinds import NonTerminal, Term, Terminal, nonterminal, show, spine, substitute
from .scheme import GameInstance
from .solver import Valuation, eval_term


@dataclass(frozen=True)
class PlayState:
    prefix: tuple[str, ...]
    focus: Term
    history: tuple[tuple[str, int], ...] = ()

    @property
    def finished(self) -> bool:
        return isinstance(self.focus, Terminal)

    @property
    def head(self) -> str | None:
        h, _ = spine(self.focus)
        return h.name if isinstance(h, NonTerminal) else None

    def word(self) -> str:
        return "".join(self.prefix)


@dataclass(frozen=True)
class StrategyDecision:
    nonterminal: str
    rule_index: int
    justification: Formula


@dataclass
class TraceStep:
    owner: str
    nonterminal: str
    rule_index: int
    prefix: str
    formula: str

    def line(self) -> str:
        return f"{self.owner} {self.nonterminal} {self.rule_index} | {self.prefix} | {self.formula}"


def peel(prefix: tuple[str, ...], term: Term) -> tuple[tuple[str, ...], Term]:
    """Move leading unary letters from ``term`` into ``prefix``."""
    letters = list(prefix)
    while True:
        h, args = spine(term)
        if isinstance(h, Terminal) and len(args) == 1:
            letters.append(h.name)
            term = args[0]
        else:
            return tuple(letters), term


def initial_state(game: GameInstance) -> PlayState:
    s = game.scheme
    prefix, focus = peel((), nonterminal(s.start, s.nonterminals[s.start]))
    return PlayState(prefix, focus)


def successor_term(game: GameInstance, focus: Term, rule_index: int) -> tuple[str, Term]:
    head, args = spine(focus)
    if not isinstance(head, NonTerminal):
        raise NotARedex(f"{show(focus)} is not headed by a non-terminal")
    if len(args) != head.kind.arity:
        raise NotARedex(f"{show(focus)} applies {head.name} to {len(args)} of {head.kind.arity} arguments")
    rules = game.scheme.rules[head.name]
    if not 1 <= rule_index <= len(rules):
        raise BadRuleIndex(f"{head.name} has rules 1..{len(rules)}, got {rule_index}")
    rule = rules[rule_index - 1]
    return head.name, substitute(rule.body, {p: a for (p, _), a in zip(rule.params, args)})


def oi_step(game: GameInstance, state: PlayState, rule_index: int) -> PlayState:
    """Rewrite the focus redex with the given (1-based) rule and re-peel the prefix."""
    nt, t = successor_term(game, state.focus, rule_index)
    prefix, focus = peel(state.prefix, t)
    return PlayState(prefix, focus, state.history + ((nt, rule_index),))


def wrap(model: Model, prefix, phi: Formula) -> Formula:
    for a in reversed(prefix):
        phi = model.apply_value(model.interp[a], phi)
    return phi


def formula_of_state(model: Model, solution: Valuation, state: PlayState) -> Formula:
    """Semantics of the whole game term ``a1 (... (ak focus))`` under ``solution``."""
    return wrap(model, state.prefix, eval_term(model, state.focus, solution))


def holds(model: Model, phi: Formula) -> bool:
    return satisfied_by(phi, model.winning_assignment())


def extract_choice(model: Model, solution: Valuation, game: GameInstance, state: PlayState) -> StrategyDecision:
    """Least rule index whose successor term keeps the formula satisfied."""
    nt = state.head
    if nt is None:
        raise NotARedex("the play has already ended")
    for i in range(1, len(game.scheme.rules[nt]) + 1):
        nxt = oi_step(game, state, i)
        phi = formula_of_state(model, solution, nxt)
        if holds(model, phi):
            return StrategyDecision(nt, i, phi)
    raise NoSatisfyingChoice(f"no rule of {nt} keeps the formula satisfied at prefix {state.word()!r}")


# -- simulation ----------------------------------------------------------------

@dataclass(frozen=True)
class Exhaustive:
    depth: int
    max_nodes: int = 1_000_000


@dataclass(frozen=True)
class RandomAdversary:
    seed: int
    steps: int


@dataclass
class Verdict:
    nodes: int = 0
    terminated: int = 0
    depth_cut: int = 0
    truncated: bool = False
    words: set = field(default_factory=set)
    trace: list = field(default_factory=list)


def _check_invariant(model, solution, state, trace):
    phi = formula_of_state(model, solution, state)
    if not holds(model, phi):
        raise StrategyRefuted(trace + [f"invariant lost at prefix {state.word()!r}: {render(phi)}"])
    return phi


def _finish(game, state, trace, verdict):
    verdict.terminated += 1
    verdict.words.add(state.word())
    if not game.nfa.accepts(state.prefix):
        raise StrategyRefuted(trace + [f"emitted rejected word {state.word()!r}"])


def simulate(model: Model, solution: Valuation, game: GameInstance, adversary) -> Verdict:
    """Play E's extracted strategy against an adversary for A.

    ``Exhaustive(depth)`` tries every A choice up to ``depth`` rewriting steps
    (identical ``(focus, forward set, remaining depth)`` nodes are explored
    once); ``RandomAdversary(seed, steps)`` plays one random line and keeps its
    trace. Raises ``StrategyRefuted`` if the formula of the current term stops
    being satisfied or a finished play emits a rejected word.
    """
    verdict = Verdict()
    start = initial_state(game)
    if isinstance(adversary, RandomAdversary):
        rng = random.Random(adversary.seed)
        state = start
        _check_invariant(model, solution, state, [])
        for _ in range(adversary.steps):
            verdict.nodes += 1
            if state.finished:
                break
            nt = state.head
            if game.owner(nt) == "E":
                idx = extract_choice(model, solution, game, state).rule_index
            else:
                idx = rng.randint(1, len(game.scheme.rules[nt]))
            state = oi_step(game, state, idx)
            phi = _check_invariant(model, solution, state, [s.line() for s in verdict.trace])
            verdict.trace.append(TraceStep(game.owner(nt), nt, idx, state.word(), render(phi)))
        if state.finished:
            _finish(game, state, [s.line() for s in verdict.trace], verdict)
        else:
            verdict.depth_cut += 1
        return verdict

    nfa = game.nfa
    seen = set()
    stack = [(start, nfa.run(start.prefix), adversary.depth)]
    while stack:
        state, fwd, d = stack.pop()
        key = (state.focus, fwd, d)
        if key in seen:
            continue
        seen.add(key)
        verdict.nodes += 1
        if verdict.nodes > adversary.max_nodes:
            verdict.truncated = True
            break
        trace = [f"{h[0]} {h[1]}" for h in state.history]
        _check_invariant(model, solution, state, trace)
        if state.finished:
            _finish(game, state, trace, verdict)
            continue
        if d == 0:
            verdict.depth_cut += 1
            continue
        nt = state.head
        if game.owner(nt) == "E":
            choices = [extract_choice(model, solution, game, state).rule_index]
        else:
            choices = range(1, len(game.scheme.rules[nt]) + 1)
        for i in choices:
            nxt = oi_step(game, state, i)
            stack.append((nxt, nfa.run(nxt.prefix[len(state.prefix):], fwd), d - 1))
    return verdict


# -- oracles -------------------------------------------------------------------

def _successors(game: GameInstance, focus: Term, fwd: int):
    nfa = game.nfa
    out = []
    for i in range(1, len(game.scheme.rules[spine(focus)[0].name]) + 1):
        _, t = successor_term(game, focus, i)
        letters, nf = peel((), t)
        out.append((nf, nfa.run(letters, fwd)))
    return out


def _start_node(game: GameInstance):
    s = initial_state(game)
    return s.focus, game.nfa.run(s.prefix)


def oracle_attractor(game: GameInstance, state_budget: int = 100_000) -> str:
    """Exact winner by A's attractor on the finite graph of ``(focus, forward set)`` nodes.

    Returns ``"Unknown"`` when the graph has more than ``state_budget`` nodes.
    """
    nfa = game.nfa
    start = _start_node(game)
    succ: dict = {}
    queue = deque([start])
    succ[start] = None
    while queue:
        node = queue.popleft()
        focus, fwd = node
        if isinstance(focus, Terminal):
            succ[node] = ()
            continue
        nxt = _successors(game, focus, fwd)
        succ[node] = nxt
        for m in nxt:
            if m not in succ:
                if len(succ) >= state_budget:
                    return "Unknown"
                succ[m] = None
                queue.append(m)
    preds: dict = {n: [] for n in succ}
    for n, ms in succ.items():
        for m in ms:
            preds[m].append(n)
    # counters: E nodes need every successor attracted, A nodes any one
    need = {}
    attr = set()
    work = deque()
    for n, ms in succ.items():
        focus, fwd = n
        if isinstance(focus, Terminal):
            if not fwd & nfa.final_set:
                attr.add(n)
                work.append(n)
        else:
            owner = game.owner(spine(focus)[0].name)
            need[n] = 1 if owner == "A" else len(set(ms))
    counted = set()
    while work:
        m = work.popleft()
        for n in preds[m]:
            if n in attr or (n, m) in counted:
                continue
            counted.add((n, m))
            need[n] -= 1
            if need[n] == 0:
                attr.add(n)
                work.append(n)
    return "A" if start in attr else "E"


A_WINS = "AWinsWithinDepth"
NO_A_WIN = "NoAWinWithinDepth"


def oracle_bounded_a_win(game: GameInstance, depth: int) -> str:
    """Whether A can force a rejected word within ``depth`` rewriting steps."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    nfa = game.nfa
    memo: dict = {}

    def win(focus, fwd, d):
        if isinstance(focus, Terminal):
            return not fwd & nfa.final_set
        if d == 0:
            return False
        key = (focus, fwd, d)
        r = memo.get(key)
        if r is None:
            kids = _successors(game, focus, fwd)
            if game.owner(spine(focus)[0].name) == "A":
                r = any(win(f, q, d - 1) for f, q in kids)
            else:
                r = all(win(f, q, d - 1) for f, q in kids)
            memo[key] = r
        return r

    focus, fwd = _start_node(game)
    return A_WINS if win(focus, fwd, depth) else NO_A_WIN


def least_a_win_depth(game: GameInstance, max_depth: int) -> int | None:
    """Smallest depth at which ``oracle_bounded_a_win`` succeeds, by iterative deepening."""
    for d in range(1, max_depth + 1):
        if oracle_bounded_a_win(game, d) == A_WINS:
            return d
    return None
