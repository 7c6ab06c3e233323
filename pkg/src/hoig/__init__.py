"""Solver for inclusion games over word-generating higher-order recursion schemes."""
from .automaton import NFA, parse_nfa
from .domain import abstract_model, alpha_formula, optimized_model
from .scheme import GameInstance, Scheme, determinize, load_game, parse_game, parse_scheme
from .solver import check_transfer, decide_winner, eval_term, rhs_step, solve, solve_game
from .strategy import Exhaustive, RandomAdversary, extract_choice, oi_step, oracle_attractor, oracle_bounded_a_win, simulate

__all__ = [
    "NFA", "parse_nfa", "abstract_model", "optimized_model", "alpha_formula",
    "GameInstance", "Scheme", "determinize", "load_game", "parse_game", "parse_scheme",
    "check_transfer", "decide_winner", "eval_term", "rhs_step", "solve", "solve_game",
    "Exhaustive", "RandomAdversary", "extract_choice", "oi_step", "oracle_attractor", "oracle_bounded_a_win", "simulate",
]
