"""Solve the bundled doubling game in both models and play E's strategy once."""
import sys
from pathlib import Path

from hoig import (RandomAdversary, abstract_model, decide_winner, determinize, load_game, optimized_model,
                  simulate, solve)

GAMES = Path(__file__).resolve().parent.parent / "games"


def main(scheme="doubling.hors", nfa="only_b.nfa"):
    game = load_game(GAMES / scheme, GAMES / nfa)
    det = determinize(game.scheme)
    for build in (optimized_model, abstract_model):
        m = build(game)
        res = solve(m, det)
        print(f"[{m.name}] winner {decide_winner(m, res)} after {res.iterations} iterations "
              f"({res.mode}, {res.points} points, {res.seconds * 1000:.1f} ms)")
        for f, phi in sorted(res.formulas.items()):
            print(f"  sol({f}) = {phi}")
        if m.name == "optimized" and decide_winner(m, res) == "E":
            v = simulate(m, res.solution, game, RandomAdversary(seed=1, steps=20))
            for step in v.trace:
                print("  " + step.line())


if __name__ == "__main__":
    main(*sys.argv[1:3])
