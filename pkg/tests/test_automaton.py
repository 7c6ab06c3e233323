import itertools

import pytest
from hypothesis import given, strategies as st

from hoig.automaton import NFA, format_nfa, parse_nfa
from hoig.errors import HoigSyntaxError, UnknownLetter, ValidationError

B_ONLY = NFA(("q0", "qf"), frozenset("ab"), frozenset({("q0", "b", "qf")}), "q0", frozenset({"qf"}))


def test_pre_post_on_single_transition():
    qf = B_ONLY.mask(["qf"])
    assert B_ONLY.pre("b", qf) == B_ONLY.q0
    assert B_ONLY.pre("a", qf) == 0
    assert B_ONLY.post("b", B_ONLY.q0) == qf
    with pytest.raises(UnknownLetter):
        B_ONLY.pre("c", qf)


def test_acc_closure_of_b_automaton():
    sets = [B_ONLY.show_set(s) for s in B_ONLY.acc_closure()]
    assert sets == ["{qf}", "{}", "{q0}"]
    for s, w in B_ONLY.acc_witnesses():
        assert B_ONLY.acc_of_word(w) == s


@st.composite
def nfas(draw):
    n = draw(st.integers(1, 4))
    states = tuple(f"q{i}" for i in range(n))
    trans = draw(st.frozensets(st.tuples(st.sampled_from(states), st.sampled_from("ab"), st.sampled_from(states))))
    finals = draw(st.frozensets(st.sampled_from(states)))
    return NFA(states, frozenset("ab"), trans, "q0", finals)


def brute_accepts(nfa, word):
    # explicit run enumeration
    for run in itertools.product(nfa.states, repeat=len(word)):
        path = ("q0",) + run
        if all((path[i], word[i], path[i + 1]) in nfa.transitions for i in range(len(word))):
            if path[-1] in nfa.finals:
                return True
    return False


@given(nfas(), st.lists(st.sampled_from("ab"), max_size=4))
def test_accepts_matches_run_enumeration(nfa, word):
    assert nfa.accepts(word) == brute_accepts(nfa, word)
    assert bool(nfa.acc_of_word(word) & nfa.q0) == nfa.accepts(word)


@given(nfas())
def test_acc_closure_is_all_word_sets(nfa):
    sets = set(nfa.acc_closure())
    # every word up to length 2^n reaches only sets already in the closure
    for k in range(5):
        for w in itertools.product("ab", repeat=k):
            assert nfa.acc_of_word(w) in sets
    assert nfa.final_set in sets


def test_parse_roundtrip():
    text = format_nfa(B_ONLY)
    again = parse_nfa(text, alphabet="ab")
    assert again == B_ONLY
    assert parse_nfa("states q0; initial q0; final;").final_set == 0


def test_parse_errors():
    with pytest.raises(HoigSyntaxError) as e:
        parse_nfa("states q0\ninitial q0")
    assert e.value.line == 2
    with pytest.raises(ValidationError):
        parse_nfa("states q0; initial q1;")
    with pytest.raises(UnknownLetter):
        parse_nfa("states q0; initial q0; trans q0 c q0;", alphabet="ab")
