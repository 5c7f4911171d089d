"""Lexer, abstract syntax and parser for the effect language.

Grammar (``#`` starts a line comment)::

    t ::= let x = t in t | return t | force t | fst t | snd t | atom
    atom ::= x | lit | () | (t, t) | (t) | thunk { t } | force-free primitives
    primitives: sample { lit: q, ... } | flip q | fail | ask | or(t, ..., t) | fresh

Prefix forms bind tighter than ``let``, whose body extends as far right as
possible.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

KEYWORDS = {"let", "in", "return", "thunk", "force", "fst", "snd", "sample", "flip", "fail", "ask", "or", "fresh"}


class DslSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class DuplicateBinderWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, sym, kw, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      |(?P<nl>\n)
      |(?P<comment>\#[^\n]*)
      |(?P<dec>\d+\.\d+)
      |(?P<int>\d+)
      |(?P<ident>[A-Za-z_$][A-Za-z0-9_'$-]*)
      |(?P<sym>[(){},:=/])""",
    re.VERBOSE,
)


def tokenize(src: str, line: int = 1, col: int = 1) -> list[Token]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            if kind not in ("ws", "comment"):
                out.append(Token(kind, text, line, col))
            col += len(text)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# abstract syntax


@dataclass(frozen=True)
class Term:
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var(Term):
    name: str = ""


@dataclass(frozen=True)
class Lit(Term):
    label: str = ""


@dataclass(frozen=True)
class UnitV(Term):
    pass


@dataclass(frozen=True)
class Pair(Term):
    left: Term = None
    right: Term = None


@dataclass(frozen=True)
class Fst(Term):
    body: Term = None


@dataclass(frozen=True)
class Snd(Term):
    body: Term = None


@dataclass(frozen=True)
class Let(Term):
    var: str = ""
    bound: Term = None
    body: Term = None


@dataclass(frozen=True)
class Return(Term):
    body: Term = None


@dataclass(frozen=True)
class Thunk(Term):
    body: Term = None


@dataclass(frozen=True)
class Force(Term):
    body: Term = None


@dataclass(frozen=True)
class Sample(Term):
    weights: tuple = ()  # ((label, Fraction), ...)


@dataclass(frozen=True)
class Flip(Term):
    prob: Fraction = Fraction(1, 2)


@dataclass(frozen=True)
class Fail(Term):
    pass


@dataclass(frozen=True)
class Ask(Term):
    pass


@dataclass(frozen=True)
class Or(Term):
    branches: tuple = ()


@dataclass(frozen=True)
class Fresh(Term):
    pass


PRIMITIVES = (Sample, Flip, Fail, Ask, Or, Fresh)


def show(t: Term) -> str:
    """Concrete syntax that parses back to ``t``."""
    match t:
        case Var(name=n):
            return n
        case Lit(label=l):
            return l
        case UnitV():
            return "()"
        case Pair(left=a, right=b):
            return f"({show(a)}, {show(b)})"
        case Fst(body=b):
            return f"fst {_show_arg(b)}"
        case Snd(body=b):
            return f"snd {_show_arg(b)}"
        case Let(var=x, bound=a, body=b):
            return f"let {x} = {show(a)} in {show(b)}"
        case Return(body=b):
            return f"return {_show_arg(b)}"
        case Thunk(body=b):
            return f"thunk {{ {show(b)} }}"
        case Force(body=b):
            return f"force {_show_arg(b)}"
        case Sample(weights=ws):
            return "sample { " + ", ".join(f"{l}: {q}" for l, q in ws) + " }"
        case Flip(prob=q):
            return f"flip {q}"
        case Fail():
            return "fail"
        case Ask():
            return "ask"
        case Or(branches=bs):
            return "or(" + ", ".join(show(b) for b in bs) + ")"
        case Fresh():
            return "fresh"
    raise TypeError(f"not a term: {t!r}")


def _show_arg(t: Term) -> str:
    s = show(t)
    return f"({s})" if isinstance(t, Let) else s


def free_vars(t: Term) -> frozenset:
    match t:
        case Var(name=n):
            return frozenset([n])
        case Let(var=x, bound=a, body=b):
            return free_vars(a) | (free_vars(b) - {x})
    return frozenset().union(*(free_vars(c) for c in children(t)))


def children(t: Term) -> tuple:
    match t:
        case Pair(left=a, right=b) | Let(bound=a, body=b):
            return (a, b)
        case Fst(body=b) | Snd(body=b) | Return(body=b) | Thunk(body=b) | Force(body=b):
            return (b,)
        case Or(branches=bs):
            return tuple(bs)
    return ()


def is_value(t: Term) -> bool:
    """Effect-free terms: variables, literals, unit, pairs of values and thunks."""
    match t:
        case Var() | Lit() | UnitV() | Thunk():
            return True
        case Pair(left=a, right=b):
            return is_value(a) and is_value(b)
    return False


def _fresh_name(base: str, avoid: frozenset) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def subst(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding substitution of ``v`` for ``x``."""
    match t:
        case Var(name=n):
            return v if n == x else t
        case Let(var=y, bound=a, body=b):
            a2 = subst(a, x, v)
            if y == x:
                return Let(t.pos, y, a2, b)
            if y in free_vars(v):
                z = _fresh_name(y, free_vars(v) | free_vars(b) | {x})
                b = subst(b, y, Var(t.pos, z))
                y = z
            return Let(t.pos, y, a2, subst(b, x, v))
        case Pair(left=a, right=b):
            return Pair(t.pos, subst(a, x, v), subst(b, x, v))
        case Fst(body=b):
            return Fst(t.pos, subst(b, x, v))
        case Snd(body=b):
            return Snd(t.pos, subst(b, x, v))
        case Return(body=b):
            return Return(t.pos, subst(b, x, v))
        case Thunk(body=b):
            return Thunk(t.pos, subst(b, x, v))
        case Force(body=b):
            return Force(t.pos, subst(b, x, v))
        case Or(branches=bs):
            return Or(t.pos, tuple(subst(b, x, v) for b in bs))
    return t


# ---------------------------------------------------------------------------
# parser


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.scope: list[str] = []

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.cur
        raise DslSyntaxError(msg, tok.line, tok.col)

    def advance(self) -> Token:
        tok = self.cur
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.cur.kind in ("sym", "kw") and self.cur.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.cur.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse_all(self) -> Term:
        t = self.term()
        if self.cur.kind != "eof":
            self.error(f"unexpected {self.cur.text!r} after term")
        return t

    def term(self) -> Term:
        tok = self.cur
        if self.at("let"):
            self.advance()
            name = self.cur
            if name.kind != "ident":
                self.error("expected a variable name after 'let'")
            self.advance()
            if name.text in self.scope:
                warnings.warn(
                    f"{name.line}:{name.col}: binder {name.text!r} shadows an enclosing binder",
                    DuplicateBinderWarning,
                    stacklevel=2,
                )
            self.expect("=")
            bound = self.term()
            self.expect("in")
            self.scope.append(name.text)
            try:
                body = self.term()
            finally:
                self.scope.pop()
            return Let((tok.line, tok.col), name.text, bound, body)
        return self.prefix()

    def prefix(self) -> Term:
        tok = self.cur
        pos = (tok.line, tok.col)
        for kw, cls in (("force", Force), ("fst", Fst), ("snd", Snd), ("return", Return)):
            if self.at(kw):
                self.advance()
                return cls(pos, self.prefix_arg())
        return self.atom()

    def prefix_arg(self) -> Term:
        if self.at("let"):
            return self.term()
        return self.prefix()

    def rational(self) -> Fraction:
        tok = self.cur
        if tok.kind == "dec":
            self.advance()
            return Fraction(tok.text)
        if tok.kind != "int":
            self.error("expected a rational number")
        self.advance()
        num = int(tok.text)
        if self.at("/"):
            self.advance()
            den = self.cur
            if den.kind != "int":
                self.error("expected a denominator")
            self.advance()
            if int(den.text) == 0:
                self.error("zero denominator", den)
            return Fraction(num, int(den.text))
        return Fraction(num)

    def label(self) -> str:
        tok = self.cur
        if tok.kind not in ("ident", "int"):
            self.error("expected a point label")
        self.advance()
        return tok.text

    def atom(self) -> Term:
        tok = self.cur
        pos = (tok.line, tok.col)
        if tok.kind == "ident":
            self.advance()
            return Var(pos, tok.text) if tok.text in self.scope else Lit(pos, tok.text)
        if tok.kind == "int":
            self.advance()
            return Lit(pos, tok.text)
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return UnitV(pos)
            first = self.term()
            if self.at(","):
                self.advance()
                second = self.term()
                self.expect(")")
                return Pair(pos, first, second)
            self.expect(")")
            return first
        if self.at("thunk"):
            self.advance()
            self.expect("{")
            body = self.term()
            self.expect("}")
            return Thunk(pos, body)
        if self.at("sample"):
            self.advance()
            self.expect("{")
            weights = []
            while True:
                lab = self.label()
                self.expect(":")
                weights.append((lab, self.rational()))
                if not self.at(","):
                    break
                self.advance()
            self.expect("}")
            return Sample(pos, tuple(weights))
        if self.at("flip"):
            self.advance()
            q = self.rational()
            if not 0 <= q <= 1:
                self.error(f"flip probability {q} outside [0, 1]", tok)
            return Flip(pos, q)
        if self.at("or"):
            self.advance()
            self.expect("(")
            branches = [self.term()]
            while self.at(","):
                self.advance()
                branches.append(self.term())
            self.expect(")")
            return Or(pos, tuple(branches))
        for kw, cls in (("fail", Fail), ("ask", Ask), ("fresh", Fresh)):
            if self.at(kw):
                self.advance()
                return cls(pos)
        found = tok.text or "end of input"
        self.error(f"unexpected {found!r}")


def parse(src: str, line: int = 1, col: int = 1, scope: tuple = ()) -> Term:
    """Parse a term; identifiers in ``scope`` or bound by ``let`` are variables, others literals."""
    p = Parser(tokenize(src, line, col))
    p.scope = list(scope)
    return p.parse_all()


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from iter_subterms(c)
