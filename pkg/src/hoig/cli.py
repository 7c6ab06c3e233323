"""``hoig`` command line: solve, play, check-transfer, oracle."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .domain import DEFAULT_CAP, abstract_model, optimized_model
from .errors import BudgetExceeded, HoigError, InputError, InvariantViolation, StrategyRefuted
from .scheme import determinize, load_game
from .solver import DEFAULT_MAX_ITERS, check_transfer, decide_winner, solve
from .strategy import RandomAdversary, least_a_win_depth, oracle_attractor, simulate

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    scheme: str
    nfa: str
    model: str = "optimized"
    max_iters: int = DEFAULT_MAX_ITERS
    domain_cap: int = DEFAULT_CAP
    mode: str = "auto"
    depth: int = 30
    state_budget: int = 100_000
    steps: int = 50
    samples: int = 16
    json: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("max_iters", "domain_cap", "depth", "state_budget", "steps", "samples"):
            if getattr(self, name) < 1:
                raise InputError(f"--{name.replace('_', '-')} must be positive")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hoig", description="Inclusion games over word-generating recursion schemes.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("solve", "compute the greatest fixpoint and the winner"),
        ("play", "play E's strategy against a random opponent and print the trace"),
        ("check-transfer", "compare the abstract and optimized solutions"),
        ("oracle", "brute-force winner on the explicit play graph"),
    ]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("scheme")
        s.add_argument("nfa")
        s.add_argument("--model", choices=["optimized", "abstract"], default="optimized")
        s.add_argument("--mode", choices=["auto", "exhaustive", "local"], default="auto")
        s.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
        s.add_argument("--domain-cap", type=int, default=DEFAULT_CAP)
        s.add_argument("--depth", type=int, default=30)
        s.add_argument("--state-budget", type=int, default=100_000)
        s.add_argument("--steps", type=int, default=50)
        s.add_argument("--samples", type=int, default=16)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--json", action="store_true")
    return p


def _model(cfg, game):
    return (abstract_model if cfg.model == "abstract" else optimized_model)(game, cfg.domain_cap)


def _emit(cfg, report: dict, lines: list[str]):
    if cfg.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))


def cmd_solve(cfg: RunConfig, game) -> int:
    m = _model(cfg, game)
    res = solve(m, determinize(game.scheme), max_iters=cfg.max_iters, mode=cfg.mode)
    winner = decide_winner(m, res)
    report = {
        "winner": winner, "model": m.name, "mode": res.mode, "iterations": res.iterations,
        "points": res.points, "formulas": res.formulas, "domains": m.stats(), "seconds": round(res.seconds, 6),
    }
    lines = [f"winner: {winner}", f"model: {m.name} ({res.mode})", f"iterations: {res.iterations}"]
    lines += [f"sol({f}) = {phi}" for f, phi in sorted(res.formulas.items())]
    _emit(cfg, report, lines)
    return EXIT_OK


def cmd_play(cfg: RunConfig, game) -> int:
    m = _model(cfg, game)
    res = solve(m, determinize(game.scheme), max_iters=cfg.max_iters, mode=cfg.mode)
    winner = decide_winner(m, res)
    if winner == "A":
        _emit(cfg, {"winner": "A", "trace": []}, ["winner: A", "E has no winning strategy to play"])
        return EXIT_OK
    v = simulate(m, res.solution, game, RandomAdversary(cfg.seed, cfg.steps))
    outcome = "accepted" if v.terminated else "depth-cut"
    word = next(iter(v.words)) if v.words else None
    report = {
        "winner": "E", "outcome": outcome, "word": word,
        "trace": [{"owner": s.owner, "nonterminal": s.nonterminal, "rule": s.rule_index,
                   "prefix": s.prefix, "formula": s.formula} for s in v.trace],
    }
    lines = ["winner: E"] + [s.line() for s in v.trace]
    lines.append(f"outcome: {outcome}" + (f" word {word!r}" if word is not None else ""))
    _emit(cfg, report, lines)
    return EXIT_OK


def cmd_check_transfer(cfg: RunConfig, game) -> int:
    rep = check_transfer(game, samples=cfg.samples, seed=cfg.seed, cap=cfg.domain_cap, max_iters=cfg.max_iters)
    status = "exact" if rep.exact else "mismatch"
    report = {
        "transfer": status, "checked": rep.checked, "precision": rep.precision,
        "mismatches": [[f, list(w)] for f, w in rep.mismatches],
        "abstract": rep.abstract.formulas, "optimized": rep.optimized.formulas,
    }
    lines = [f"transfer: {status}", f"checked: {rep.checked}"]
    lines += [f"precision {k}: {'ok' if ok else 'FAILED'}" for k, ok in sorted(rep.precision.items())]
    lines += [f"mismatch at {f}: arguments {w}" for f, w in rep.mismatches]
    _emit(cfg, report, lines)
    return EXIT_OK if rep.exact else EXIT_INVARIANT


def cmd_oracle(cfg: RunConfig, game) -> int:
    att = oracle_attractor(game, cfg.state_budget)
    d = least_a_win_depth(game, cfg.depth)
    bounded = f"A wins within depth {d}" if d is not None else f"no A win within depth {cfg.depth}"
    report = {"attractor": att, "a_win_depth": d, "depth": cfg.depth}
    _emit(cfg, report, [f"attractor: {att}", f"bounded: {bounded}"])
    return EXIT_BUDGET if att == "Unknown" else EXIT_OK


COMMANDS = {"solve": cmd_solve, "play": cmd_play, "check-transfer": cmd_check_transfer, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.scheme, args.nfa, args.model, args.max_iters, args.domain_cap,
                        args.mode, args.depth, args.state_budget, args.steps, args.samples, args.json, args.seed)
        game = load_game(cfg.scheme, cfg.nfa)
        return COMMANDS[cfg.command](cfg, game)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except StrategyRefuted as e:
        print("strategy refuted, trace:", file=sys.stderr)
        for line in e.trace:
            print(f"  {line}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InvariantViolation, HoigError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
