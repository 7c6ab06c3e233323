"""Random games, automata, terms and valuations for the property tests and experiments."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .automaton import NFA
from .domain import FuncValue, Model, Value
from .errors import DomainTooLarge, ValidationError
from .kinds import GROUND, Arrow, Kind, Term, app, arrow, lam, nonterminal, terminal, var
from .scheme import GameInstance, Rule, Scheme

O = GROUND
O1 = arrow(O, O)
O2 = arrow(O, O, O)
H2 = arrow(O1, O, O)

KIND_POOL = {0: [O], 1: [O1, O2], 2: [H2]}


@dataclass
class GameConfig:
    order: int = 1
    letters: tuple[str, ...] = ("a", "b")
    end: str = "e"
    max_extra_nts: int = 2
    max_rules: int = 2
    body_depth: int = 3
    nfa_states: int = 3
    max_acc: int = 4
    final_prob: float = 0.4
    trans_prob: float = 0.35


def random_nfa(rng: random.Random, letters, n_states: int, trans_prob=0.35, final_prob=0.4) -> NFA:
    states = tuple(f"q{i}" for i in range(n_states))
    trans = frozenset((p, a, q) for p in states for a in letters for q in states if rng.random() < trans_prob)
    finals = frozenset(q for q in states if rng.random() < final_prob)
    return NFA(states, frozenset(letters), trans, states[0], finals)


def random_small_nfa(rng: random.Random, cfg: GameConfig) -> NFA:
    """Rejection-sample an NFA whose ``Acc(T*)`` stays small enough for the abstract model."""
    while True:
        n = rng.randint(1, cfg.nfa_states)
        nfa = random_nfa(rng, cfg.letters, n, cfg.trans_prob, cfg.final_prob)
        if len(nfa.acc_closure()) <= cfg.max_acc:
            return nfa


def _heads_for(symbols: list[Term], target: Kind):
    """Symbols ``h : k1 -> ... -> kn -> target`` paired with their argument kinds."""
    out = []
    for h in symbols:
        k = h.kind
        args = []
        while True:
            if k == target:
                out.append((h, args))
                break
            if not isinstance(k, Arrow):
                break
            args = args + [k.left]
            k = k.right
    return out


def random_term(rng: random.Random, symbols: list[Term], kind: Kind, depth: int) -> Term:
    """A lambda-free term of ``kind`` over ``symbols``; shrinks towards leaves as ``depth`` runs out."""
    cands = _heads_for(symbols, kind)
    if not cands:
        raise ValidationError(f"no symbol produces kind {kind!r}")
    if depth <= 0:
        least = min(len(a) for _, a in cands)
        cands = [c for c in cands if len(c[1]) == least]
    h, args = rng.choice(cands)
    return app(h, *(random_term(rng, symbols, k, depth - 1) for k in args))


def random_closed_term(scheme: Scheme, kind: Kind, rng: random.Random, depth: int = 3) -> Term:
    """A closed term of ``kind`` over the scheme's symbols, with lambdas allowed at arrow kinds."""
    symbols = [terminal(n, k) for n, k in scheme.terminals.items()]
    symbols += [nonterminal(n, k) for n, k in scheme.nonterminals.items()]
    return _closed(rng, symbols, kind, depth, 0)


def _closed(rng, symbols, kind, depth, fresh):
    if isinstance(kind, Arrow) and rng.random() < 0.5:
        x = var(f"_x{fresh}", kind.left)
        body = _closed(rng, symbols + [x], kind.right, depth, fresh + 1)
        return lam(x.name, kind.left, body)
    cands = _heads_for(symbols, kind)
    if not cands or depth <= 0:
        if isinstance(kind, Arrow) and (not cands or min(len(a) for _, a in cands) > 0):
            x = var(f"_x{fresh}", kind.left)
            return lam(x.name, kind.left, _closed(rng, symbols + [x], kind.right, depth, fresh + 1))
        least = min(len(a) for _, a in cands)
        cands = [c for c in cands if len(c[1]) == least]
    h, args = rng.choice(cands)
    return app(h, *(_closed(rng, symbols, k, depth - 1, fresh) for k in args))


def random_scheme(rng: random.Random, cfg: GameConfig) -> tuple[Scheme, dict[str, str]]:
    terms = {cfg.end: O}
    for a in cfg.letters:
        terms[a] = O1
    nts: dict[str, Kind] = {"S": O}
    pool = [k for o in range(cfg.order + 1) for k in KIND_POOL[o]]
    n_extra = rng.randint(1 if cfg.order > 0 else 0, cfg.max_extra_nts)
    for i in range(n_extra):
        nts[f"F{i}"] = rng.choice(pool)
    if cfg.order > 0 and all(k.order < cfg.order for k in nts.values()):
        nts[f"F{n_extra}"] = rng.choice(KIND_POOL[cfg.order])
    globals_ = [terminal(n, k) for n, k in terms.items()] + [nonterminal(n, k) for n, k in nts.items()]
    rules = {}
    for f, k in nts.items():
        params = tuple((f"x{i}", pk) for i, pk in enumerate(k.args()))
        scope = globals_ + [var(p, pk) for p, pk in params]
        n_rules = rng.randint(1, cfg.max_rules)
        rules[f] = tuple(Rule(f, params, random_term(rng, scope, O, rng.randint(1, cfg.body_depth)))
                         for _ in range(n_rules))
    owners = {f: rng.choice("EA") for f in nts}
    return Scheme(terms, nts, rules, "S"), owners


def random_game(rng: random.Random, cfg: GameConfig | None = None) -> GameInstance:
    cfg = cfg or GameConfig()
    scheme, owners = random_scheme(rng, cfg)
    return GameInstance(scheme, random_small_nfa(rng, cfg), owners)


def random_value(model: Model, kind: Kind, rng: random.Random) -> Value:
    """A uniformly drawn element of the enumerated domain, or a random monotone lazy value."""
    if kind is GROUND or kind.arity == 1 and kind.order == 1:
        try:
            return rng.choice(model.enumerate_domain(kind).elements)
        except DomainTooLarge:
            pass
    if kind is GROUND:
        gens = model.ground_generators()
        v = rng.choice(gens)
        for _ in range(rng.randint(0, 3)):
            v = (v & rng.choice(gens)) if rng.random() < 0.5 else (v | rng.choice(gens))
        return v
    res = random_value(model, kind.right, rng)
    return FuncValue(kind.left, kind.right, lambda _d: res, label="const")


def random_valuation_pair(model: Model, scheme: Scheme, rng: random.Random) -> tuple[dict, dict]:
    """Valuations ``nu <= nu2``: ``nu2`` is drawn first, ``nu`` is its meet with another draw."""
    hi, lo = {}, {}
    for f, k in scheme.nonterminals.items():
        a = random_value(model, k, rng)
        b = random_value(model, k, rng)
        hi[f] = a
        lo[f] = model.meet_value(a, b)
    return lo, hi
