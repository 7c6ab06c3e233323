"""Term semantics, Kleene iteration from top, and the abstract/optimized transfer check.

The solver works on uncurried points ``(F, (k1, ..., kn))``: a non-terminal
applied to a full tuple of argument keys, whose value is a ground formula.

* ``exhaustive`` mode seeds every point of the enumerated argument domains, so
  each round is one application of the right-hand-side functional and the
  stop test is full extensional equality.
* ``local`` mode seeds only the start symbol and adds the points that the
  evaluation actually consults. A consulted point that is not yet tracked is
  read as top. The iterates stay above the greatest fixpoint, and once a round
  changes nothing and consults no new point, the tracked values are a fixpoint
  of a closed subsystem and therefore equal the greatest fixpoint there.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Mapping

from .domain import DEFAULT_CAP, FuncValue, Model, Value, abstract_model, alpha_formula, optimized_model
from .errors import (
    DomainTooLarge, InvariantViolation, IterationBudgetExceeded, TransferMismatch, UnboundSymbol,
)
from .formula import Formula, conj, implies, render, satisfied_by
from .kinds import GROUND, App, Lam, NonTerminal, Term, Terminal, Var, arrow
from .scheme import DetScheme, GameInstance, determinize

Valuation = Mapping[str, Value]

DEFAULT_MAX_ITERS = 1000


def eval_term(model: Model, term: Term, valuation: Valuation) -> Value:
    if isinstance(term, App):
        return model.apply_value(eval_term(model, term.fun, valuation), eval_term(model, term.arg, valuation))
    if isinstance(term, Terminal):
        try:
            return model.interp[term.name]
        except KeyError:
            raise UnboundSymbol(f"terminal {term.name} has no interpretation") from None
    if isinstance(term, (NonTerminal, Var)):
        try:
            return valuation[term.name]
        except KeyError:
            raise UnboundSymbol(f"{term.name} is not bound by the valuation") from None
    if isinstance(term, Lam):
        body, x = term.body, term.var

        def fn(d):
            inner = dict(valuation)
            inner[x] = d
            return eval_term(model, body, inner)
        return FuncValue(term.var_kind, body.kind, fn, label="lambda")
    raise TypeError(term)


def top_valuation(model: Model, det: DetScheme) -> dict[str, Value]:
    return {f: model.top_value(k) for f, k in det.base.nonterminals.items()}


def rhs_step(model: Model, det: DetScheme, valuation: Valuation) -> dict[str, Value]:
    """One application of the right-hand-side functional, as lazy values."""
    return {f: eval_term(model, rule.lam, valuation) for f, rule in det.det_rules.items()}


# -- fixpoint engine -----------------------------------------------------------

class _Engine:
    def __init__(self, model: Model, det: DetScheme, exhaustive: bool, max_iters: int):
        self.model = model
        self.det = det
        self.exhaustive = exhaustive
        self.max_iters = max_iters
        self.kinds = {f: k.args() for f, k in det.base.nonterminals.items()}
        self.params = {f: [p for p, _ in r.params] for f, r in det.det_rules.items()}
        self.bodies = {f: r.body for f, r in det.det_rules.items()}
        self.args: dict[tuple, tuple] = {}
        self.values: dict[tuple, Formula] = {}
        self.iterations = 0
        self.evaluations = 0
        self.history: list[int] = []
        # local mode bookkeeping
        self.readers: dict[tuple, set] = {}
        self.worklist: list = []
        self.queued: set = set()
        self.exact: set = set()
        self.fresh: list = []

    def seed(self):
        m = self.model
        if self.exhaustive:
            for f, ks in self.kinds.items():
                doms = [m.enumerate_domain(k).elements for k in ks]
                for vals in itertools.product(*doms):
                    self._add((f, tuple(m.key(v) for v in vals)), vals)
        else:
            self._add((self.det.base.start, ()), ())

    def _add(self, point, vals):
        self.args[point] = vals
        self.values[point] = self.model.TRUE
        if not self.exhaustive:
            self.fresh.append(point)
            self._push(point)

    def _push(self, point):
        if point not in self.queued:
            self.queued.add(point)
            self.worklist.append(point)

    def nt_value(self, f: str, lookup) -> Value:
        ks = self.kinds[f]
        n = len(ks)

        def partial(done):
            if len(done) == n:
                return lookup(f, done)
            i = len(done)
            return FuncValue(ks[i], arrow(*ks[i + 1:], GROUND), lambda d: partial(done + (d,)), label=f)
        return partial(())

    def valuation(self, lookup) -> dict[str, Value]:
        return {f: self.nt_value(f, lookup) for f in self.kinds}

    def _eval_point(self, p, lookup):
        f = p[0]
        env = self.valuation(lookup)
        env.update(zip(self.params[f], self.args[p]))
        self.evaluations += 1
        return eval_term(self.model, self.bodies[f], env)

    # -- exhaustive: Kleene rounds over every point --------------------------

    def run_rounds(self) -> int:
        m = self.model
        rounds = 0
        while True:
            if rounds >= self.max_iters:
                raise IterationBudgetExceeded(self.max_iters)
            prev = self.values

            def lookup(f, vals):
                r = prev.get((f, tuple(m.key(v) for v in vals)))
                if r is None:
                    raise InvariantViolation(f"point outside the enumerated domain consulted for {f}")
                return r

            new = {p: self._eval_point(p, lookup) for p in self.args}
            rounds += 1
            changed = 0
            for p, v in new.items():
                old = prev[p]
                if v is not old:
                    if not implies(v, old):
                        raise InvariantViolation(f"descending chain violated at {p[0]}")
                    changed += 1
            self.values = new
            self.history.append(changed)
            if not changed:
                return rounds

    # -- local: worklist over the points that are actually consulted ---------

    def run_worklist(self) -> int:
        """Chaotic iteration from top until the consulted points are closed and stable.

        The worklist is processed in generations; a point is re-evaluated in the
        next generation when a value it read has changed. A re-evaluation may
        consult a point that was just added at top and so come out higher than
        before; the new value is therefore met with the old one, which keeps
        every point descending and above the greatest fixpoint. Points settled
        by an earlier run already hold greatest-fixpoint values and must not
        move. Returns the number of generations.
        """
        m = self.model
        rounds = 0
        while self.worklist:
            rounds += 1
            if rounds > self.max_iters:
                raise IterationBudgetExceeded(self.max_iters)
            batch, self.worklist, self.queued = self.worklist, [], set()
            changed = 0
            for p in batch:
                old = self.values[p]
                v = conj(self._eval_point(p, self._reader(p)), old)
                if v is not old:
                    if p in self.exact:
                        raise InvariantViolation(f"exact value at {p[0]} moved while extending")
                    self.values[p] = v
                    changed += 1
                    for r in self.readers.get(p, ()):
                        self._push(r)
            self.history.append(changed)
        for p in self.fresh:
            if self._eval_point(p, self._reader(p)) is not self.values[p] or self.worklist:
                raise InvariantViolation(f"local iteration stopped short of a fixpoint at {p[0]}")
        self.exact.update(self.fresh)
        self.fresh.clear()
        return rounds

    def _reader(self, p):
        m = self.model

        def lookup(f, vals):
            q = (f, tuple(m.key(v) for v in vals))
            r = self.values.get(q)
            if r is None:
                self._add(q, vals)
                r = m.TRUE
            self.readers.setdefault(q, set()).add(p)
            return r
        return lookup

    def final_lookup(self, f, vals):
        p = (f, tuple(self.model.key(v) for v in vals))
        r = self.values.get(p)
        if r is None:
            if self.exhaustive:
                raise InvariantViolation(f"point outside the enumerated domain requested for {f}")
            self._add(p, vals)
            self.run_worklist()
            r = self.values[p]
        return r


@dataclass
class FixpointResult:
    model: Model
    det: DetScheme
    solution: dict[str, Value]
    iterations: int
    formulas: dict[str, str]
    stable: bool
    mode: str
    seconds: float
    engine: _Engine = field(repr=False)

    @property
    def start_formula(self) -> Formula:
        return self.solution[self.det.base.start]

    @property
    def points(self) -> int:
        return len(self.engine.values)

    def value(self, nt: str) -> Value:
        return self.solution[nt]


def _exhaustive_fits(model: Model, det: DetScheme) -> bool:
    total = 0
    try:
        for k in det.base.nonterminals.values():
            size = 1
            for a in k.args():
                size *= len(model.enumerate_domain(a))
            total += size
            if total > model.cap:
                return False
    except DomainTooLarge:
        return False
    return True


def solve(model: Model, det: DetScheme, max_iters: int = DEFAULT_MAX_ITERS, mode: str = "auto") -> FixpointResult:
    """Greatest fixpoint of the determinized scheme by Kleene iteration from top."""
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    if mode == "auto":
        mode = "exhaustive" if _exhaustive_fits(model, det) else "local"
    if mode not in ("exhaustive", "local"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    eng = _Engine(model, det, mode == "exhaustive", max_iters)
    eng.seed()
    eng.iterations = eng.run_rounds() if eng.exhaustive else eng.run_worklist()
    solution = eng.valuation(eng.final_lookup)
    formulas = {f: render(v) for f, v in solution.items() if isinstance(v, Formula)}
    return FixpointResult(model, det, solution, eng.iterations, formulas, True, mode,
                          time.perf_counter() - t0, eng)


def decide_winner(model: Model, result: FixpointResult) -> str:
    if not result.stable:
        raise InvariantViolation("winner requested for an unstable result")
    phi = result.start_formula
    return "E" if satisfied_by(phi, model.winning_assignment()) else "A"


def solve_game(game: GameInstance, model: str = "optimized", cap: int = DEFAULT_CAP,
               max_iters: int = DEFAULT_MAX_ITERS, mode: str = "auto"):
    """Parse-free convenience: build the model, determinize, solve and decide."""
    m = abstract_model(game, cap) if model == "abstract" else optimized_model(game, cap)
    det = determinize(game.scheme)
    res = solve(m, det, max_iters=max_iters, mode=mode)
    return decide_winner(m, res), res


# -- transfer ------------------------------------------------------------------

@dataclass
class TransferReport:
    checked: int = 0
    mismatches: list = field(default_factory=list)
    precision: dict = field(default_factory=dict)
    abstract: FixpointResult | None = None
    optimized: FixpointResult | None = None

    @property
    def exact(self) -> bool:
        return not self.mismatches and all(self.precision.values())

    def raise_if_mismatch(self):
        if self.mismatches:
            nt, witness = self.mismatches[0]
            raise TransferMismatch(nt, witness)
        bad = [k for k, ok in self.precision.items() if not ok]
        if bad:
            raise TransferMismatch("precision", bad)


def check_transfer(game: GameInstance, samples: int = 16, seed: int = 0, cap: int = DEFAULT_CAP,
                   max_iters: int = DEFAULT_MAX_ITERS) -> TransferReport:
    """Compare the abstraction of the abstract solution with the optimized one.

    Ground non-terminals are compared directly. Non-terminals of arrow kind
    are applied to paired arguments ``(v, alpha(v))`` down to ground: ground
    arguments come from the abstract ground enumeration when it fits the cap,
    function arguments are closed terms evaluated in both models.
    """
    from .generate import random_closed_term

    rng = random.Random(seed)
    det = determinize(game.scheme)
    am = abstract_model(game, cap)
    om = optimized_model(game, cap)
    ares = solve(am, det, max_iters=max_iters)
    ores = solve(om, det, max_iters=max_iters)
    report = TransferReport(abstract=ares, optimized=ores)

    def alpha(phi):
        return alpha_formula(am, om, phi)

    try:
        ground_abs = am.enumerate_domain(GROUND).elements
    except DomainTooLarge:
        ground_abs = None

    pool_cache: dict = {}

    def pairs_for(kind):
        if kind in pool_cache:
            return pool_cache[kind]
        if kind is GROUND and ground_abs is not None:
            pool = [(v, alpha(v)) for v in ground_abs]
        else:
            pool = []
            seen = set()
            for _ in range(samples * 4):
                t = random_closed_term(game.scheme, kind, rng, depth=3)
                if t in seen:
                    continue
                seen.add(t)
                pool.append((eval_term(am, t, ares.solution), eval_term(om, t, ores.solution)))
                if len(pool) >= samples:
                    break
        pool_cache[kind] = pool
        return pool

    for f, k in game.scheme.nonterminals.items():
        ks = k.args()
        av, ov = ares.solution[f], ores.solution[f]
        if not ks:
            report.checked += 1
            if alpha(av) is not ov:
                report.mismatches.append((f, ()))
            continue
        pools = [pairs_for(a) for a in ks]
        combos = list(itertools.product(*(range(len(p)) for p in pools)))
        if len(combos) > samples * 4:
            combos = rng.sample(combos, samples * 4)
        for combo in combos:
            a_args = [pools[i][j][0] for i, j in enumerate(combo)]
            o_args = [pools[i][j][1] for i, j in enumerate(combo)]
            report.checked += 1
            if alpha(am.apply_all(av, *a_args)) is not om.apply_all(ov, *o_args):
                report.mismatches.append((f, combo))

    # precision on the ground domain and the terminals
    prec = report.precision
    if ground_abs is not None:
        try:
            image = {alpha(v) for v in ground_abs}
            prec["surjective"] = image == set(om.enumerate_domain(GROUND).elements)
        except DomainTooLarge:
            pass
    prec["top"] = alpha(am.TRUE) is om.TRUE
    end = game.scheme.end
    prec["end"] = alpha(am.interp[end]) is om.interp[end]
    ground_pool = pairs_for(GROUND) if ground_abs is not None else [
        (g, alpha(g)) for g in am.ground_generators()]
    ok = True
    for a in game.scheme.letters:
        for v, av_ in ground_pool:
            if alpha(am.apply_value(am.interp[a], v)) is not om.apply_value(om.interp[a], av_):
                ok = False
    for f, (name, ell) in det.op_terminals.items():
        for _ in range(min(samples, len(ground_pool) ** ell)):
            args = [rng.choice(ground_pool) for _ in range(ell)]
            lhs = alpha(am.apply_all(am.interp[name], *[x for x, _ in args]))
            rhs = om.apply_all(om.interp[name], *[y for _, y in args])
            if lhs is not rhs:
                ok = False
    prec["terminals"] = ok
    return report
