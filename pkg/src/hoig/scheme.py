"""Surface syntax of games, validation, and determinization.

Scheme file::

    terminal a : o -> o;
    terminal end : o;
    nonterminal S : o owner E;
    nonterminal H : (o -> o) -> o -> o owner A;
    start S;
    rule S = H a end;
    rule H = \\f:(o->o). \\x:o. f (f x);

Application is left-associative juxtaposition, ``->`` is right-associative
and ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .automaton import NFA, format_nfa, parse_nfa
from .errors import HoigSyntaxError, KindMismatch, UnboundSymbol, ValidationError
from .kinds import (
    GROUND, App, Arrow, Kind, Term, Var, app, arrow, lam, lams, nonterminal, show,
    spine, terminal, var,
)

OP_PREFIX = "op$"
OWNERS = ("E", "A")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_'$]*)
  | (?P<punct>[;:().=\\])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


class Lexer:
    def __init__(self, text: str):
        self.tokens = list(self._scan(text))
        self.pos = 0

    @staticmethod
    def _scan(text: str) -> Iterator[Token]:
        line, start, i = 1, 0, 0
        while i < len(text):
            m = _TOKEN.match(text, i)
            if m is None:
                raise HoigSyntaxError(f"unexpected character {text[i]!r}", line, i - start + 1)
            kind = m.lastgroup
            if kind == "nl":
                line += 1
                start = m.end()
            elif kind != "ws":
                yield Token(kind, m.group(), line, i - start + 1)
            i = m.end()
        yield Token("eof", "", line, i - start + 1)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise HoigSyntaxError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def expect_ident(self) -> Token:
        tok = self.next()
        if tok.kind != "ident":
            self.fail(f"expected a name, found {tok.text or 'end of input'!r}", tok)
        return tok

    def idents_until_semi(self) -> list[str]:
        out = []
        while self.peek().text != ";":
            out.append(self.expect_ident().text)
        self.expect(";")
        return out


# -- data ------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    head: str
    params: tuple[tuple[str, Kind], ...]
    body: Term

    @property
    def lam(self) -> Term:
        return lams(self.params, self.body)


@dataclass(frozen=True)
class Scheme:
    terminals: dict[str, Kind]
    nonterminals: dict[str, Kind]
    rules: dict[str, tuple[Rule, ...]]
    start: str

    def __post_init__(self):
        validate_scheme(self)

    @property
    def end(self) -> str:
        return next(n for n, k in self.terminals.items() if k is GROUND)

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(n for n, k in self.terminals.items() if k is not GROUND)

    @property
    def order(self) -> int:
        return max((k.order for k in self.nonterminals.values()), default=0)

    def symbol(self, name: str) -> Term:
        if name in self.terminals:
            return terminal(name, self.terminals[name])
        if name in self.nonterminals:
            return nonterminal(name, self.nonterminals[name])
        raise UnboundSymbol(f"unknown symbol {name}")


@dataclass(frozen=True)
class GameInstance:
    scheme: Scheme
    nfa: NFA
    ownership: dict[str, str]

    def __post_init__(self):
        for f in self.scheme.nonterminals:
            if self.ownership.get(f) not in OWNERS:
                raise ValidationError(f"non-terminal {f} has no owner (E or A)")
        extra = set(self.ownership) - set(self.scheme.nonterminals)
        if extra:
            raise ValidationError(f"ownership given for unknown symbols {sorted(extra)}")
        if self.nfa.alphabet != frozenset(self.scheme.letters):
            unknown = {a for _, a, _ in self.nfa.transitions} - set(self.scheme.letters)
            if unknown:
                raise ValidationError(f"NFA uses letters {sorted(unknown)} that are not terminals of the scheme")
            object.__setattr__(self, "nfa", self.nfa.with_alphabet(self.scheme.letters))

    def owner(self, nt: str) -> str:
        return self.ownership[nt]


@dataclass(frozen=True)
class DetScheme:
    """One rule per non-terminal: ``F = \\x1..xk. op$F e1 ... el``."""

    base: Scheme
    op_terminals: dict[str, tuple[str, int]]
    det_rules: dict[str, Rule]

    def stripped(self, nt: str) -> tuple[Rule, ...]:
        """Recover the original rule bodies (under the det rule's parameter names)."""
        rule = self.det_rules[nt]
        _, args = spine(rule.body)
        return tuple(Rule(nt, rule.params, e) for e in args)


# -- validation --------------------------------------------------------------

def validate_scheme(s: Scheme):
    for name in list(s.terminals) + list(s.nonterminals):
        if name.startswith(OP_PREFIX):
            raise ValidationError(f"name {name} uses the reserved prefix {OP_PREFIX}")
        if name == "o":
            raise ValidationError("'o' is reserved for the ground kind")
    both = set(s.terminals) & set(s.nonterminals)
    if both:
        raise ValidationError(f"symbols declared both terminal and non-terminal: {sorted(both)}")
    grounds = [n for n, k in s.terminals.items() if k is GROUND]
    if len(grounds) != 1:
        raise ValidationError(f"word-generating scheme needs exactly one terminal of kind o, found {len(grounds)}")
    unary = Arrow(GROUND, GROUND)
    for n, k in s.terminals.items():
        if k is not GROUND and k != unary:
            raise ValidationError(f"word-generating scheme violated: terminal {n} has kind {k!r}, expected o -> o")
    if s.start not in s.nonterminals:
        raise ValidationError(f"start symbol {s.start} is not a declared non-terminal")
    if s.nonterminals[s.start] is not GROUND:
        raise ValidationError(f"start symbol {s.start} must have kind o")
    for f, k in s.nonterminals.items():
        rules = s.rules.get(f, ())
        if not rules:
            raise ValidationError(f"non-terminal {f} has no rule")
        for r in rules:
            _check_rule(s, f, k, r)
    extra = set(s.rules) - set(s.nonterminals)
    if extra:
        raise ValidationError(f"rules for undeclared non-terminals {sorted(extra)}")


def _check_rule(s: Scheme, f: str, k: Kind, r: Rule):
    want = k.args()
    if len(r.params) != len(want):
        raise ValidationError(f"rule for {f} binds {len(r.params)} variables, kind {k!r} needs {len(want)}")
    names = [p for p, _ in r.params]
    if len(set(names)) != len(names):
        raise ValidationError(f"rule for {f} binds a variable twice")
    for (p, pk), wk in zip(r.params, want):
        if pk != wk:
            raise ValidationError(f"rule for {f}: variable {p} has kind {pk!r}, expected {wk!r}")
        if p in s.terminals or p in s.nonterminals:
            raise ValidationError(f"rule for {f}: variable {p} clashes with a terminal or non-terminal")
    if r.body.has_lambda:
        raise ValidationError(f"rule for {f}: body is not lambda-free")
    if r.body.kind is not GROUND:
        raise ValidationError(f"rule for {f}: body has kind {r.body.kind!r}, expected o")
    stray = {n for n, _ in r.body.free_vars} - set(names)
    if stray:
        raise ValidationError(f"rule for {f}: body is not variable-closed, free {sorted(stray)}")
    if r.head != f:
        raise ValidationError(f"rule head {r.head} filed under {f}")


# -- parsing -----------------------------------------------------------------

def _parse_kind(lex: Lexer) -> Kind:
    tok = lex.next()
    if tok.text == "(":
        left = _parse_kind(lex)
        lex.expect(")")
    elif tok.text == "o":
        left = GROUND
    else:
        lex.fail(f"expected a kind, found {tok.text or 'end of input'!r}", tok)
    if lex.peek().kind == "arrow":
        lex.next()
        return Arrow(left, _parse_kind(lex))
    return left


def _parse_term(lex: Lexer):
    """Raw term: ``("sym", name, tok)``, ``("app", f, a)`` or ``("lam", name, kind, body, tok)``."""
    tok = lex.peek()
    if tok.text == "\\":
        lex.next()
        name = lex.expect_ident()
        lex.expect(":")
        kind = _parse_kind(lex)
        lex.expect(".")
        return ("lam", name.text, kind, _parse_term(lex), tok)
    head = _parse_atom(lex)
    while True:
        nxt = lex.peek()
        if nxt.kind == "ident" or nxt.text in ("(", "\\"):
            arg = _parse_term(lex) if nxt.text == "\\" else _parse_atom(lex)
            head = ("app", head, arg)
        else:
            return head


def _parse_atom(lex: Lexer):
    tok = lex.next()
    if tok.text == "(":
        t = _parse_term(lex)
        lex.expect(")")
        return t
    if tok.kind != "ident":
        lex.fail(f"expected a term, found {tok.text or 'end of input'!r}", tok)
    return ("sym", tok.text, tok)


def _resolve(raw, terms: dict[str, Kind], nts: dict[str, Kind], scope: dict[str, Kind]) -> Term:
    tag = raw[0]
    if tag == "sym":
        name, tok = raw[1], raw[2]
        if name in scope:
            return var(name, scope[name])
        if name in terms:
            return terminal(name, terms[name])
        if name in nts:
            return nonterminal(name, nts[name])
        raise UnboundSymbol(f"{tok.line}:{tok.col}: unbound symbol {name}")
    if tag == "app":
        f = _resolve(raw[1], terms, nts, scope)
        a = _resolve(raw[2], terms, nts, scope)
        try:
            return app(f, a)
        except KindMismatch as exc:
            raise KindMismatch(f"{app_site(raw)}: {exc}") from None
    _, name, kind, body, _ = raw
    inner = dict(scope)
    inner[name] = kind
    return lam(name, kind, _resolve(body, terms, nts, inner))


def app_site(raw) -> str:
    while raw[0] == "app":
        raw = raw[1]
    if raw[0] == "sym":
        tok = raw[2]
        return f"{tok.line}:{tok.col}"
    return f"{raw[4].line}:{raw[4].col}"


def parse_scheme(text: str) -> tuple[Scheme, dict[str, str]]:
    """Parse a scheme file into a validated ``Scheme`` and its ownership map."""
    lex = Lexer(text)
    terms: dict[str, Kind] = {}
    nts: dict[str, Kind] = {}
    owners: dict[str, str] = {}
    raw_rules: list[tuple[Token, object]] = []
    start = None
    while not lex.at_end():
        kw = lex.expect_ident()
        if kw.text in ("terminal", "nonterminal"):
            name = lex.expect_ident()
            lex.expect(":")
            kind = _parse_kind(lex)
            if name.text in terms or name.text in nts:
                lex.fail(f"duplicate declaration of {name.text}", name)
            if name.text.startswith(OP_PREFIX):
                lex.fail(f"name {name.text} uses the reserved prefix {OP_PREFIX}", name)
            if kw.text == "terminal":
                terms[name.text] = kind
            else:
                nts[name.text] = kind
                if lex.peek().text == "owner":
                    lex.next()
                    who = lex.expect_ident()
                    if who.text not in OWNERS:
                        lex.fail(f"owner must be E or A, found {who.text!r}", who)
                    owners[name.text] = who.text
            lex.expect(";")
        elif kw.text == "start":
            if start is not None:
                lex.fail("duplicate start declaration", kw)
            start = lex.expect_ident().text
            lex.expect(";")
        elif kw.text == "rule":
            name = lex.expect_ident()
            lex.expect("=")
            body = _parse_term(lex)
            lex.expect(";")
            raw_rules.append((name, body))
        else:
            lex.fail(f"unexpected keyword {kw.text!r}", kw)
    if start is None:
        raise ValidationError("missing start declaration")
    rules: dict[str, list[Rule]] = {}
    for name, raw in raw_rules:
        if name.text not in nts:
            raise ValidationError(f"{name.line}:{name.col}: rule for undeclared non-terminal {name.text}")
        params = []
        while raw[0] == "lam":
            params.append((raw[1], raw[2]))
            raw = raw[3]
        scope = dict(params)
        if len(scope) != len(params):
            raise ValidationError(f"{name.line}:{name.col}: rule for {name.text} binds a variable twice")
        for p, _ in params:
            if p in terms or p in nts:
                raise ValidationError(f"{name.line}:{name.col}: variable {p} clashes with a terminal or non-terminal")
        body = _resolve(raw, terms, nts, scope)
        if body.has_lambda:
            raise ValidationError(f"{name.line}:{name.col}: rule for {name.text}: body is not lambda-free")
        rules.setdefault(name.text, []).append(Rule(name.text, tuple(params), body))
    scheme = Scheme(terms, nts, {f: tuple(rs) for f, rs in rules.items()}, start)
    return scheme, owners


def parse_game(scheme_text: str, nfa_text: str) -> GameInstance:
    scheme, owners = parse_scheme(scheme_text)
    nfa = parse_nfa(nfa_text, alphabet=scheme.letters)
    return GameInstance(scheme, nfa, owners)


def load_game(scheme_path, nfa_path) -> GameInstance:
    with open(scheme_path, encoding="utf-8") as fh:
        st = fh.read()
    with open(nfa_path, encoding="utf-8") as fh:
        nt = fh.read()
    return parse_game(st, nt)


# -- printing ----------------------------------------------------------------

def _kind_src(k: Kind) -> str:
    return repr(k)


def format_scheme(scheme: Scheme, ownership: dict[str, str] | None = None) -> str:
    lines = []
    for n, k in scheme.terminals.items():
        lines.append(f"terminal {n} : {_kind_src(k)};")
    for n, k in scheme.nonterminals.items():
        own = f" owner {ownership[n]}" if ownership and n in ownership else ""
        lines.append(f"nonterminal {n} : {_kind_src(k)}{own};")
    lines.append(f"start {scheme.start};")
    for f in scheme.nonterminals:
        for r in scheme.rules[f]:
            lines.append(f"rule {f} = {show(r.lam)};")
    return "\n".join(lines) + "\n"


def format_game(game: GameInstance) -> tuple[str, str]:
    return format_scheme(game.scheme, game.ownership), format_nfa(game.nfa)


# -- determinization ---------------------------------------------------------

def rename_vars(term: Term, mapping: dict[str, str]) -> Term:
    """Rename free variables of a lambda-free term."""
    if term.has_lambda:
        raise ValueError("rename_vars expects a lambda-free term")
    if not term.free_vars:
        return term
    if isinstance(term, Var):
        return var(mapping.get(term.name, term.name), term.kind)
    if isinstance(term, App):
        return app(rename_vars(term.fun, mapping), rename_vars(term.arg, mapping))
    return term


def op_name(nt: str) -> str:
    return OP_PREFIX + nt


def determinize(scheme: Scheme) -> DetScheme:
    ops = {}
    det = {}
    for f, k in scheme.nonterminals.items():
        rules = scheme.rules[f]
        params = rules[0].params
        bodies = []
        for r in rules:
            mapping = {p: q for (p, _), (q, _) in zip(r.params, params)}
            bodies.append(rename_vars(r.body, mapping))
        ell = len(bodies)
        name = op_name(f)
        ops[f] = (name, ell)
        op = terminal(name, arrow(*([GROUND] * (ell + 1))))
        det[f] = Rule(f, params, app(op, *bodies))
    return DetScheme(scheme, ops, det)
