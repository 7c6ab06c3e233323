import random

import pytest

from hoig.errors import HoigSyntaxError, KindMismatch, UnboundSymbol, ValidationError
from hoig.generate import GameConfig, random_game
from hoig.kinds import GROUND, arrow, show, spine
from hoig.scheme import determinize, format_game, parse_game, parse_scheme

HEADER = "terminal a : o -> o;\nterminal end : o;\n"


def scheme_text(*lines):
    return HEADER + "\n".join(lines) + "\n"


def test_doubling_parses(doubling_game):
    s = doubling_game.scheme
    assert s.end == "end" and s.letters == ("a", "b")
    assert s.nonterminals["H"] == arrow(arrow(GROUND, GROUND), GROUND, GROUND)
    assert s.order == 2
    assert doubling_game.owner("S") == "E" and doubling_game.owner("H") == "A"
    assert [show(r.body) for r in s.rules["H"]] == ["f (f x)", "H (H f) x"]


def test_determinize_doubling(doubling_game):
    det = determinize(doubling_game.scheme)
    assert show(det.det_rules["S"].body) == "op$S (H a end) (b end)"
    assert show(det.det_rules["H"].body) == "op$H (f (f x)) (H (H f) x)"
    assert det.op_terminals["H"] == ("op$H", 2)
    op, _ = spine(det.det_rules["S"].body)
    assert op.kind == arrow(GROUND, GROUND, GROUND)
    assert [show(r.body) for r in det.stripped("H")] == ["f (f x)", "H (H f) x"]


def test_determinize_renames_to_first_rule_params():
    s, _ = parse_scheme(scheme_text(
        "nonterminal S : o;", "nonterminal F : o -> o;", "start S;", "rule S = F end;",
        "rule F = \\x:o. a x;", "rule F = \\y:o. y;"))
    det = determinize(s)
    assert show(det.det_rules["F"].body) == "op$F (a x) x"


def test_single_rule_gives_unary_op():
    s, _ = parse_scheme(scheme_text("nonterminal S : o;", "start S;", "rule S = a end;"))
    assert determinize(s).op_terminals["S"] == ("op$S", 1)


@pytest.mark.parametrize("lines, exc", [
    (("nonterminal S : o;", "start S;"), ValidationError),                                 # no rule
    (("nonterminal S : o -> o;", "start S;", "rule S = \\x:o. x;"), ValidationError),       # start not ground
    (("nonterminal S : o;", "start S;", "rule S = a;"), ValidationError),                   # body not ground
    (("nonterminal S : o;", "start S;", "rule S = a z;"), UnboundSymbol),
    (("nonterminal S : o;", "start S;", "rule S = end end;"), KindMismatch),
    (("nonterminal S : o;", "nonterminal F : o -> o;", "start S;", "rule S = F end;",
      "rule F = \\x:o. \\y:o. x;"), ValidationError),                                        # binder count
    (("nonterminal S : o;", "nonterminal F : o -> o;", "start S;", "rule S = F end;",
      "rule F = \\a:o. end;"), ValidationError),                                             # variable clashes
    (("nonterminal S : o;", "start S;", "rule S = (\\x:o. x) end;"), ValidationError),      # lambda in body
])
def test_validation_errors(lines, exc):
    with pytest.raises(exc):
        parse_scheme(scheme_text(*lines))


def test_word_generating_shape_enforced():
    with pytest.raises(ValidationError):
        parse_scheme("terminal g : o -> o -> o;\nterminal end : o;\nnonterminal S : o;\nstart S;\nrule S = end;")
    with pytest.raises(ValidationError):
        parse_scheme("terminal a : o -> o;\nnonterminal S : o;\nstart S;\nrule S = S;")
    with pytest.raises(HoigSyntaxError):
        parse_scheme("terminal op$x : o;\n")


def test_syntax_error_has_position():
    with pytest.raises(HoigSyntaxError) as e:
        parse_scheme(HEADER + "nonterminal S : o\nstart S;")
    assert (e.value.line, e.value.col) == (4, 1)


def test_missing_owner_rejected():
    with pytest.raises(ValidationError):
        parse_game(scheme_text("nonterminal S : o;", "start S;", "rule S = end;"), "states q0; initial q0;")


def test_format_roundtrip_on_random_games():
    rng = random.Random(7)
    for order in (0, 1, 2):
        for _ in range(10):
            g = random_game(rng, GameConfig(order=order))
            st, nt = format_game(g)
            again = parse_game(st, nt)
            assert format_game(again) == (st, nt)
            assert again.scheme.rules == g.scheme.rules
