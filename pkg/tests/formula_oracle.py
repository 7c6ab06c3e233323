"""Truth-table oracle for positive Boolean formulas, independent of the clause engine."""
import itertools
import random

from hoig.formula import conj, disj


def random_tree(rng: random.Random, n: int, depth: int):
    r = rng.random()
    if depth == 0 or r < 0.25:
        c = rng.random()
        if c < 0.05:
            return ("true",)
        if c < 0.1:
            return ("false",)
        return ("atom", rng.randrange(n))
    op = "and" if r < 0.6 else "or"
    return (op, random_tree(rng, n, depth - 1), random_tree(rng, n, depth - 1))


def eval_tree(t, env) -> bool:
    tag = t[0]
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "atom":
        return env[t[1]]
    a, b = eval_tree(t[1], env), eval_tree(t[2], env)
    return (a and b) if tag == "and" else (a or b)


def build(t, u):
    tag = t[0]
    if tag == "true":
        return u.TRUE
    if tag == "false":
        return u.FALSE
    if tag == "atom":
        return u.atom(t[1])
    f, g = build(t[1], u), build(t[2], u)
    return conj(f, g) if tag == "and" else disj(f, g)


def envs(n):
    return itertools.product((False, True), repeat=n)


def table_tree(t, n):
    return tuple(eval_tree(t, e) for e in envs(n))


def table_formula(f, n):
    # CNF read directly: every clause needs a true atom
    out = []
    for e in envs(n):
        out.append(all(any(e[i] for i in range(n) if c >> i & 1) for c in f.clauses))
    return tuple(out)
