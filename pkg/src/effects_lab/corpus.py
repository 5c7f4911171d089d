"""The corpus file format.

A corpus is a sequence of blocks::

    space bool { kind = set; points = [ff, tt] }
    space sierpinski { kind = top; points = [0, 1]; generators = [[1]] }
    kernel coin : one -> bool @ dist { * -> { tt: 1/2, ff: 1/2 } }
    program m1 @ hoare { thunk { or(tt, ff) } }
    outer mix @ dist over bool { { {tt: 1}: 1/2, {ff: 1}: 1/2 } }
    staged pos { 0 = [*]; 1 = [*, +] }
    config { nmax = 4; seed = 0; stage-bound = 5 }
    include "other.lab"

``generators`` are open sets for ``top`` (a subbasis) and measurable sets for
``meas``.  Kernel rows send a point to an element of ``T`` of the codomain:
a weighted set ``{y: q, ...}`` for measures, a closed set ``{y, ...}`` for
``hoare``, ``y`` or ``Nothing`` for ``maybe``, and a pair ``(y0, y1)`` for
``reader`` (one value per environment).  A bare point means its unit.
Outer elements are written the same way one level up; for ``hoare`` the
listed closed sets generate the outer closed set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import MEAS, SET, TOP, FinSpace, StructureError, fmt_point
from .dsl import DslSyntaxError, DslTypeError, Term, parse, typecheck_full
from .monads import NOTHING, Just, Measure, ReaderVal, get_monad
from .monads.base import KleisliMorphism
from .namegen import Name, TableObject

KINDS = {"set": SET, "meas": MEAS, "top": TOP}
MONAD_NAMES = ("giry", "subgiry", "dist", "maybe", "reader", "hoare", "namegen")


class CorpusError(ValueError):
    def __init__(self, message: str, path: str = "<corpus>", line: int = 0, col: int = 0):
        super().__init__(f"{path}:{line}:{col}: {message}" if line else message)
        self.path = path
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class Tok:
    kind: str  # label, str, sym, eof
    text: str
    line: int
    col: int
    offset: int


_LABEL = r"[A-Za-z0-9_$'*+.](?:[A-Za-z0-9_$'*+.]|-(?!>))*"
_TOKEN_RE = re.compile(
    rf"""(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
      |(?P<str>"[^"\n]*")
      |(?P<sym>->|[{{}}\[\](),;:=@/])
      |(?P<label>{_LABEL})""",
    re.VERBOSE,
)


def _tokenize(src: str, path: str) -> list[Tok]:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise CorpusError(f"unexpected character {src[pos]!r}", path, line, col)
        kind, text = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Tok(kind, text, line, col, pos))
            col += len(text)
        pos = m.end()
    out.append(Tok("eof", "", line, col, pos))
    return out


@dataclass
class ProgramDef:
    name: str
    monad: str
    term: Term
    source: str


@dataclass
class OuterDef:
    name: str
    monad: str
    space: str
    value: object


@dataclass
class Corpus:
    spaces: dict = field(default_factory=dict)
    kernels: dict = field(default_factory=dict)
    programs: dict = field(default_factory=dict)
    outers: dict = field(default_factory=dict)
    staged: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    sources: list = field(default_factory=list)

    def space(self, name: str) -> FinSpace:
        if name not in self.spaces:
            raise CorpusError(f"unknown space {name!r}")
        return self.spaces[name]

    def kernel(self, name: str) -> KleisliMorphism:
        if name not in self.kernels:
            raise CorpusError(f"unknown kernel {name!r}")
        return self.kernels[name]

    def program(self, name: str) -> ProgramDef:
        if name not in self.programs:
            raise CorpusError(f"unknown program {name!r}")
        return self.programs[name]

    def outer(self, name: str) -> OuterDef:
        if name not in self.outers:
            raise CorpusError(f"unknown outer element {name!r}")
        return self.outers[name]

    def space_for(self, name: str, kind: str) -> FinSpace:
        """A declared space, viewed with the kind a monad needs (plain sets become discrete)."""
        X = self.space(name)
        try:
            return X.as_kind(kind)
        except StructureError as exc:
            raise CorpusError(f"space {name!r} is {X.kind}, not usable as {kind}") from exc


class _Parser:
    def __init__(self, src: str, path: str, corpus: Corpus, seen: set):
        self.src = src
        self.path = path
        self.toks = _tokenize(src, path)
        self.i = 0
        self.corpus = corpus
        self.seen = seen

    # token helpers
    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.cur
        raise CorpusError(msg, self.path, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.cur.kind == "sym" and self.cur.text == text

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def advance(self) -> Tok:
        tok = self.cur
        self.i += 1
        return tok

    def label(self, what: str = "a name") -> str:
        if self.cur.kind != "label":
            self.error(f"expected {what}, found {self.cur.text or 'end of input'!r}")
        return self.advance().text

    def keyword(self, word: str) -> None:
        if self.cur.kind != "label" or self.cur.text != word:
            self.error(f"expected {word!r}")
        self.advance()

    def rational(self) -> Fraction:
        tok = self.cur
        text = self.label("a number")
        try:
            q = Fraction(text)
        except (ValueError, ZeroDivisionError):
            self.error(f"{text!r} is not a number", tok)
        if self.at("/"):
            self.advance()
            den = self.cur
            d = self.label("a denominator")
            if not d.isdigit() or int(d) == 0:
                self.error(f"bad denominator {d!r}", den)
            q /= int(d)
        return q

    # generic values
    def value(self):
        """label | Nothing | just v | (v, v, ...) | {v: q, ...} | {v, ...} | [v, ...]"""
        tok = self.cur
        if tok.kind == "label":
            self.advance()
            if tok.text == "just":
                return ("just", self.value())
            return tok.text
        if self.at("("):
            self.advance()
            items = []
            if not self.at(")"):
                items.append(self.value())
                while self.at(","):
                    self.advance()
                    items.append(self.value())
            self.expect(")")
            return ("tuple", tuple(items))
        if self.at("["):
            return ("list", tuple(self.list_of(self.value)))
        if self.at("{"):
            self.advance()
            if self.at("}"):
                self.advance()
                return ("set", ())
            first = self.value()
            if self.at(":"):
                self.advance()
                weights = [(first, self.rational())]
                while self.at(","):
                    self.advance()
                    v = self.value()
                    self.expect(":")
                    weights.append((v, self.rational()))
                self.expect("}")
                return ("weights", tuple(weights))
            items = [first]
            while self.at(","):
                self.advance()
                items.append(self.value())
            self.expect("}")
            return ("set", tuple(items))
        self.error(f"expected a value, found {tok.text or 'end of input'!r}")

    def list_of(self, item):
        self.expect("[")
        out = []
        if not self.at("]"):
            out.append(item())
            while self.at(","):
                self.advance()
                out.append(item())
        self.expect("]")
        return out

    def attrs(self) -> dict:
        """``{ key = value; ... }`` with the raw value syntax."""
        self.expect("{")
        out = {}
        while not self.at("}"):
            tok = self.cur
            key = self.label("an attribute name")
            self.expect("=")
            if key in out:
                self.error(f"duplicate attribute {key!r}", tok)
            out[key] = (self.value(), tok)
            if self.at(";"):
                self.advance()
            elif not self.at("}"):
                self.error("expected ';' or '}'")
        self.expect("}")
        return out

    def brace_body(self) -> tuple[str, Tok]:
        """Raw source between matching braces."""
        open_tok = self.expect("{")
        depth = 1
        while depth:
            tok = self.cur
            if tok.kind == "eof":
                self.error("unbalanced '{'", open_tok)
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                depth -= 1
            self.advance()
        close = self.toks[self.i - 1]
        return self.src[open_tok.offset + 1 : close.offset], open_tok

    # blocks
    def parse(self) -> None:
        while self.cur.kind != "eof":
            tok = self.cur
            word = self.label("a block keyword")
            handler = getattr(self, f"block_{word}", None)
            if handler is None:
                self.error(f"unknown block {word!r}", tok)
            handler(tok)

    def _fresh(self, table: dict, name: str, tok: Tok, what: str) -> None:
        if name in table:
            self.error(f"{what} {name!r} is defined twice", tok)

    def block_include(self, tok: Tok) -> None:
        s = self.cur
        if s.kind != "str":
            self.error("include expects a quoted path")
        self.advance()
        target = (Path(self.path).parent / s.text[1:-1]).resolve()
        if target in self.seen:
            self.error(f"include cycle through {target.name}", s)
        if not target.exists():
            self.error(f"included file {s.text} not found", s)
        _load_into(target, self.corpus, self.seen | {target})

    def block_config(self, tok: Tok) -> None:
        for key, (v, ktok) in self.attrs().items():
            if not isinstance(v, str):
                self.error(f"config value for {key!r} must be a plain value", ktok)
            self.corpus.config[key] = int(v) if v.isdigit() else v

    def block_space(self, tok: Tok) -> None:
        name = self.label("a space name")
        self._fresh(self.corpus.spaces, name, tok, "space")
        attrs = self.attrs()
        kind_v, ktok = attrs.get("kind", ("set", tok))
        if kind_v not in KINDS:
            self.error(f"unknown kind {kind_v!r} (use set, meas or top)", ktok)
        if "points" not in attrs:
            self.error(f"space {name!r} has no points", tok)
        pts_v, ptok = attrs["points"]
        if not (isinstance(pts_v, tuple) and pts_v[0] == "list" and all(isinstance(p, str) for p in pts_v[1])):
            self.error("points must be a list of labels", ptok)
        points = pts_v[1]
        if len(set(points)) != len(points):
            self.error("repeated point", ptok)
        gens = []
        if "generators" in attrs:
            gv, gtok = attrs["generators"]
            if not (isinstance(gv, tuple) and gv[0] == "list"):
                self.error("generators must be a list of lists", gtok)
            for g in gv[1]:
                if not (isinstance(g, tuple) and g[0] == "list"):
                    self.error("each generator must be a list of points", gtok)
                if not set(g[1]) <= set(points):
                    self.error(f"generator {list(g[1])} mentions unknown points", gtok)
                gens.append(g[1])
        extra = set(attrs) - {"kind", "points", "generators"}
        if extra:
            self.error(f"unknown attribute {sorted(extra)[0]!r}", attrs[sorted(extra)[0]][1])
        try:
            X = FinSpace.from_generators(points, KINDS[kind_v], gens, name=name)
        except StructureError as exc:
            self.error(str(exc), tok)
        self.corpus.spaces[name] = X

    def _monad(self) -> str:
        self.expect("@")
        tok = self.cur
        m = self.label("a monad name")
        if m not in MONAD_NAMES:
            self.error(f"unknown monad {m!r}", tok)
        return m

    def block_kernel(self, tok: Tok) -> None:
        name = self.label("a kernel name")
        self._fresh(self.corpus.kernels, name, tok, "kernel")
        self.expect(":")
        dtok = self.cur
        dom_name = self.label("a space")
        self.expect("->")
        ctok = self.cur
        cod_name = self.label("a space")
        monad = self._monad()
        if monad == "namegen":
            self.error("kernels are not supported for namegen", tok)
        T = get_monad(monad)
        for n, t in ((dom_name, dtok), (cod_name, ctok)):
            if n not in self.corpus.spaces:
                self.error(f"unknown space {n!r}", t)
        try:
            X = self.corpus.space_for(dom_name, T.kind)
            Y = self.corpus.space_for(cod_name, T.kind)
        except CorpusError as exc:
            self.error(exc.message, dtok)
        self.expect("{")
        table = {}
        while not self.at("}"):
            rtok = self.cur
            x = self.label("a point")
            if not X.contains(x):
                self.error(f"{x!r} is not a point of {dom_name}", rtok)
            if x in table:
                self.error(f"point {x!r} has two rows", rtok)
            self.expect("->")
            vtok = self.cur
            table[x] = self.element(T, Y, self.value(), vtok)
            if self.at(";"):
                self.advance()
            elif not self.at("}"):
                self.error("expected ';' or '}'")
        self.expect("}")
        missing = [p for p in X.points if p not in table]
        if missing:
            self.error(f"kernel {name!r} has no row for {fmt_point(missing[0])}", tok)
        k = KleisliMorphism(T, X, Y, table, name=name)
        try:
            k.validate()
        except StructureError as exc:
            self.error(f"kernel {name!r}: {exc}", tok)
        self.corpus.kernels[name] = k

    def element(self, T, Y, v, tok: Tok):
        """Interpret a raw value as an element of ``T Y``."""
        try:
            out = _element(T, Y, v)
        except (StructureError, ValueError, KeyError, TypeError) as exc:
            self.error(f"bad {T.name} element: {exc}", tok)
        if not T.is_element(out, Y):
            self.error(f"{T.fmt(out)} is not an element of {T.symbol}{Y.name}", tok)
        return out

    def block_program(self, tok: Tok) -> None:
        name = self.label("a program name")
        self._fresh(self.corpus.programs, name, tok, "program")
        monad = self._monad()
        body, btok = self.brace_body()
        try:
            term = parse(body, btok.line, btok.col + 1)
            typecheck_full(term, None, monad, self.corpus.spaces)
        except DslSyntaxError as exc:
            raise CorpusError(exc.message, self.path, exc.line, exc.col) from exc
        except DslTypeError as exc:
            line, col = exc.pos if exc.pos and exc.pos[0] else (btok.line, btok.col)
            raise CorpusError(exc.message, self.path, line, col) from exc
        self.corpus.programs[name] = ProgramDef(name, monad, term, body.strip())

    def block_outer(self, tok: Tok) -> None:
        name = self.label("an outer name")
        self._fresh(self.corpus.outers, name, tok, "outer")
        monad = self._monad()
        if monad == "namegen":
            self.error("outer elements are not supported for namegen; use a program", tok)
        self.keyword("over")
        stok = self.cur
        space = self.label("a space")
        if space not in self.corpus.spaces:
            self.error(f"unknown space {space!r}", stok)
        T = get_monad(monad)
        X = self.corpus.space_for(space, T.kind)
        self.expect("{")
        vtok = self.cur
        raw = self.value()
        self.expect("}")
        try:
            rho = _outer(T, X, raw)
        except (StructureError, ValueError, KeyError, TypeError) as exc:
            self.error(f"bad outer element: {exc}", vtok)
        if not T.is_element(rho, T.T(X)):
            self.error(f"not an element of {T.symbol}{T.symbol}{space}", vtok)
        self.corpus.outers[name] = OuterDef(name, monad, space, rho)

    def block_staged(self, tok: Tok) -> None:
        name = self.label("a staged object name")
        self._fresh(self.corpus.staged, name, tok, "staged object")
        self.expect("{")
        tables = {}
        while not self.at("}"):
            stok = self.cur
            stage = self.label("a stage number")
            if not stage.isdigit():
                self.error("stages are numbered 0, 1, 2, ...", stok)
            self.expect("=")
            vtok = self.cur
            raw = self.value()
            if not (isinstance(raw, tuple) and raw[0] == "list"):
                self.error("a stage table is a list of values", vtok)
            m = int(stage)
            vals = [_staged_value(v) for v in raw[1]]
            for v in vals:
                bad = [i for i in _names_in(v) if i >= m]
                if bad:
                    self.error(f"name ${bad[0]} does not exist at stage {m}", vtok)
            tables[m] = vals
            if self.at(";"):
                self.advance()
            elif not self.at("}"):
                self.error("expected ';' or '}'")
        self.expect("}")
        if sorted(tables) != list(range(len(tables))):
            self.error("stage tables must cover 0..K without gaps", tok)
        self.corpus.staged[name] = TableObject(tables, name=name)


def _label(v):
    if not isinstance(v, str):
        raise ValueError(f"expected a point, found {_show_raw(v)}")
    return v


def _show_raw(v) -> str:
    if isinstance(v, str):
        return v
    return f"{v[0]} literal"


def _measure(Y, v) -> Measure:
    if isinstance(v, str):
        return Measure({Y.mkey(v): 1})
    if v[0] == "set" and not v[1]:
        return Measure()
    if v[0] != "weights":
        raise ValueError("expected a weighted set {y: q, ...}")
    acc: dict = {}
    for y, q in v[1]:
        if not (isinstance(y, str) and Y.contains(y)):
            raise ValueError(f"{_show_raw(y)} is not a point")
        k = Y.mkey(y)
        acc[k] = acc.get(k, 0) + q
    return Measure(acc)


def _element(T, Y, v):
    name = T.name
    if name in ("giry", "subgiry", "dist"):
        return _measure(Y, v)
    if name == "maybe":
        if v == "Nothing":
            return NOTHING
        if isinstance(v, tuple) and v[0] == "just":
            v = v[1]
        return Just(_point(Y, v))
    if name == "reader":
        if isinstance(v, str):
            return ReaderVal(_point(Y, v), _point(Y, v))
        if v[0] != "tuple" or len(v[1]) != 2:
            raise ValueError("expected a pair (value at env 0, value at env 1)")
        return ReaderVal(_point(Y, v[1][0]), _point(Y, v[1][1]))
    if name == "hoare":
        if isinstance(v, str):
            return Y.down(_point(Y, v))
        if v[0] != "set":
            raise ValueError("expected a set literal {y, ...}")
        s = frozenset(_point(Y, y) for y in v[1])
        if not Y.is_closed(s):
            raise ValueError(f"{fmt_point(s)} is not closed")
        return s
    raise ValueError(f"no element syntax for {name}")


def _point(Y, v):
    v = _label(v)
    if not Y.contains(v):
        raise ValueError(f"{v!r} is not a point")
    return v


def _outer(T, X, v):
    TX = T.T(X)
    name = T.name
    if name in ("giry", "subgiry", "dist"):
        if isinstance(v, tuple) and v[0] == "weights":
            acc: dict = {}
            for inner, q in v[1]:
                p = _element(T, X, inner)
                if not T.is_element(p, X):
                    raise ValueError(f"{T.fmt(p)} is not an element of {T.symbol}{X.name}")
                acc[p] = acc.get(p, 0) + q
            return Measure(acc)
        if isinstance(v, tuple) and v[0] == "set" and not v[1]:
            return Measure()
        return Measure({_element(T, X, v): 1})
    if name == "maybe":
        if v == "Nothing":
            return NOTHING
        if isinstance(v, tuple) and v[0] == "just":
            return Just(_element(T, X, v[1]))
        raise ValueError("expected Nothing or just <element>")
    if name == "reader":
        if isinstance(v, tuple) and v[0] == "tuple" and len(v[1]) == 2:
            return ReaderVal(_element(T, X, v[1][0]), _element(T, X, v[1][1]))
        raise ValueError("expected a pair of reader elements")
    if name == "hoare":
        if not (isinstance(v, tuple) and v[0] == "set"):
            raise ValueError("expected a set of closed sets")
        gens = [_element(T, X, c) for c in v[1]]
        return TX.closure(gens)
    raise ValueError(f"no outer syntax for {name}")


def _staged_value(v):
    if isinstance(v, str):
        if v.startswith("$") and v[1:].isdigit():
            return Name(int(v[1:]))
        return v
    if v[0] == "tuple":
        return tuple(_staged_value(c) for c in v[1])
    raise ValueError(f"unsupported staged value {_show_raw(v)}")


def _names_in(v):
    if isinstance(v, Name):
        return [v.index]
    if isinstance(v, tuple):
        return [i for c in v for i in _names_in(c)]
    return []


def _load_into(path: Path, corpus: Corpus, seen: set) -> None:
    try:
        src = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read: {exc.strerror}", str(path)) from exc
    corpus.sources.append(str(path))
    _Parser(src, str(path), corpus, seen).parse()


def load_corpus(path: str | Path) -> Corpus:
    p = Path(path).resolve()
    corpus = Corpus()
    _load_into(p, corpus, {p})
    return corpus


def parse_corpus(src: str, path: str = "<corpus>", corpus: Corpus | None = None) -> Corpus:
    corpus = corpus or Corpus()
    base = Path(path).resolve() if path != "<corpus>" else Path.cwd() / "<corpus>"
    _Parser(src, str(base) if path != "<corpus>" else path, corpus, {base}).parse()
    return corpus


def default_corpus_path() -> Path:
    return Path(__file__).parent / "data" / "corpus.lab"


def load_default() -> Corpus:
    return load_corpus(default_corpus_path())
