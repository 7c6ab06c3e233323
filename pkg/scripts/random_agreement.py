"""Random games per order: solver winner against the oracles, transfer exactness and timings."""
import argparse
import random
import time

from hoig.generate import GameConfig, random_game
from hoig.solver import check_transfer, solve_game
from hoig.strategy import Exhaustive, least_a_win_depth, oracle_attractor, simulate


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--per-order", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=20)
    args = p.parse_args()
    rng = random.Random(args.seed)
    print("order  games  E-wins  attractor-agree/decided  A-confirmed  transfer-exact  nodes  seconds")
    for order in (0, 1, 2):
        t = time.perf_counter()
        e = agree = decided = a = a_ok = exact = nodes = 0
        for _ in range(args.per_order):
            g = random_game(rng, GameConfig(order=order, nfa_states=4))
            w, res = solve_game(g)
            att = oracle_attractor(g, 20_000)
            if att != "Unknown":
                decided += 1
                agree += att == w
            if w == "E":
                e += 1
                nodes += simulate(res.model, res.solution, g, Exhaustive(args.depth)).nodes
            else:
                a += 1
                a_ok += least_a_win_depth(g, 30) is not None
            exact += check_transfer(g, samples=8).exact
        dt = time.perf_counter() - t
        print(f"{order:5}  {args.per_order:5}  {e:6}  {agree:11}/{decided:<11}  {a_ok:5}/{a:<5}  "
              f"{exact:14}  {nodes:5}  {dt:7.1f}")


if __name__ == "__main__":
    main()
