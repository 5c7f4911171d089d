"""Types and the typechecker.

Each primitive is only available under the monads that can interpret it.
``fail`` is polymorphic; its type is solved by unification and defaults to
unit when nothing constrains it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..core import SET

from .syntax import Ask, Fail, Flip, Force, Fresh, Fst, Let, Lit, Or, Pair, Return, Sample, Snd, Term, Thunk, UnitV, Var

BOOL = "bool"
NAMES = "names"

PRIMITIVE_MONADS = {
    "sample": ("giry", "subgiry", "dist"),
    "flip": ("giry", "subgiry", "dist"),
    "fail": ("maybe", "subgiry"),
    "ask": ("reader",),
    "or": ("hoare",),
    "fresh": ("namegen",),
}


class DslTypeError(TypeError):
    def __init__(self, message: str, pos: tuple = (0, 0)):
        where = f"{pos[0]}:{pos[1]}: " if pos and pos[0] else ""
        super().__init__(where + message)
        self.pos = pos
        self.message = message


@dataclass(frozen=True)
class Type:
    pass


@dataclass(frozen=True)
class Base(Type):
    name: str


@dataclass(frozen=True)
class UnitT(Type):
    pass


@dataclass(frozen=True)
class ProdT(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class ThunkT(Type):
    body: Type


@dataclass(frozen=True)
class TVar(Type):
    ident: int


def fmt_type(t: Type) -> str:
    match t:
        case Base(name=n):
            return n
        case UnitT():
            return "unit"
        case ProdT(left=a, right=b):
            return f"({fmt_type(a)} * {fmt_type(b)})"
        case ThunkT(body=b):
            return f"thunked({fmt_type(b)})"
        case TVar(ident=i):
            return f"?{i}"
    raise TypeError(t)


def parse_type(src: str) -> Type:
    """``bool``, ``unit``, ``thunked(T)``, ``(A * B)``."""
    src = src.strip()
    if src.startswith("thunked(") and src.endswith(")"):
        return ThunkT(parse_type(src[len("thunked(") : -1]))
    if src.startswith("(") and src.endswith(")"):
        depth = 0
        for i, ch in enumerate(src[1:-1], 1):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "*" and depth == 0:
                return ProdT(parse_type(src[1:i]), parse_type(src[i + 1 : -1]))
        return parse_type(src[1:-1])
    if src == "unit":
        return UnitT()
    return Base(src)


class Checker:
    def __init__(self, monad: str, literal_spaces: Mapping[str, list]):
        self.monad = monad
        self.literal_spaces = literal_spaces
        self.subst: dict[int, Type] = {}
        self.counter = 0

    def fresh_var(self) -> TVar:
        self.counter += 1
        return TVar(self.counter)

    def resolve(self, t: Type) -> Type:
        match t:
            case TVar(ident=i) if i in self.subst:
                return self.resolve(self.subst[i])
            case ProdT(left=a, right=b):
                return ProdT(self.resolve(a), self.resolve(b))
            case ThunkT(body=b):
                return ThunkT(self.resolve(b))
        return t

    def occurs(self, i: int, t: Type) -> bool:
        t = self.resolve(t)
        match t:
            case TVar(ident=j):
                return i == j
            case ProdT(left=a, right=b):
                return self.occurs(i, a) or self.occurs(i, b)
            case ThunkT(body=b):
                return self.occurs(i, b)
        return False

    def unify(self, a: Type, b: Type, pos) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TVar):
            if self.occurs(a.ident, b):
                raise DslTypeError("recursive type", pos)
            self.subst[a.ident] = b
            return
        if isinstance(b, TVar):
            self.unify(b, a, pos)
            return
        if isinstance(a, ProdT) and isinstance(b, ProdT):
            self.unify(a.left, b.left, pos)
            self.unify(a.right, b.right, pos)
            return
        if isinstance(a, ThunkT) and isinstance(b, ThunkT):
            self.unify(a.body, b.body, pos)
            return
        raise DslTypeError(f"type mismatch: {fmt_type(a)} vs {fmt_type(b)}", pos)

    def gate(self, prim: str, pos) -> None:
        allowed = PRIMITIVE_MONADS[prim]
        if self.monad not in allowed:
            raise DslTypeError(f"'{prim}' is not available under {self.monad} (allowed: {', '.join(allowed)})", pos)

    def literal_type(self, label: str, pos) -> Type:
        if label in ("tt", "ff"):
            if BOOL not in self.literal_spaces.get(label, ()):
                raise DslTypeError("boolean literal used but no 'bool' space is declared", pos)
            return Base(BOOL)
        homes = self.literal_spaces.get(label, [])
        if not homes:
            raise DslTypeError(f"unbound identifier or unknown literal {label!r}", pos)
        if len(homes) > 1:
            raise DslTypeError(f"literal {label!r} is ambiguous: it is a point of {', '.join(sorted(homes))}", pos)
        return Base(homes[0])

    def infer(self, t: Term, ctx: Mapping[str, Type]) -> Type:
        match t:
            case Var(name=n):
                if n not in ctx:
                    raise DslTypeError(f"unbound variable {n!r}", t.pos)
                return ctx[n]
            case Lit(label=l):
                if l in ctx:
                    return ctx[l]
                return self.literal_type(l, t.pos)
            case UnitV():
                return UnitT()
            case Pair(left=a, right=b):
                return ProdT(self.infer(a, ctx), self.infer(b, ctx))
            case Fst(body=b) | Snd(body=b):
                got = self.resolve(self.infer(b, ctx))
                l, r = self.fresh_var(), self.fresh_var()
                self.unify(got, ProdT(l, r), t.pos)
                return l if isinstance(t, Fst) else r
            case Let(var=x, bound=a, body=b):
                ta = self.infer(a, ctx)
                return self.infer(b, {**ctx, x: ta})
            case Return(body=b):
                return self.infer(b, ctx)
            case Thunk(body=b):
                return ThunkT(self.infer(b, ctx))
            case Force(body=b):
                inner = self.fresh_var()
                self.unify(self.infer(b, ctx), ThunkT(inner), t.pos)
                return inner
            case Sample(weights=ws):
                self.gate("sample", t.pos)
                tys = {self.literal_type(l, t.pos) for l, _ in ws}
                if len(tys) != 1:
                    raise DslTypeError("sample mixes literals of different spaces", t.pos)
                if any(q < 0 for _, q in ws):
                    raise DslTypeError("negative weight in sample", t.pos)
                total = sum(q for _, q in ws)
                if total > 1 or (self.monad != "subgiry" and total != 1):
                    raise DslTypeError(f"sample weights add up to {total}", t.pos)
                return tys.pop()
            case Flip():
                self.gate("flip", t.pos)
                return self.literal_type("tt", t.pos)
            case Fail():
                self.gate("fail", t.pos)
                return self.fresh_var()
            case Ask():
                self.gate("ask", t.pos)
                return self.literal_type("tt", t.pos)
            case Or(branches=bs):
                self.gate("or", t.pos)
                ty = self.infer(bs[0], ctx)
                for b in bs[1:]:
                    self.unify(ty, self.infer(b, ctx), b.pos)
                return ty
            case Fresh():
                self.gate("fresh", t.pos)
                return Base(NAMES)
        raise DslTypeError(f"unknown term {t!r}")

    def default(self, t: Type) -> Type:
        """Unconstrained type variables become unit."""
        t = self.resolve(t)
        match t:
            case TVar():
                return UnitT()
            case ProdT(left=a, right=b):
                return ProdT(self.default(a), self.default(b))
            case ThunkT(body=b):
                return ThunkT(self.default(b))
        return t


def monad_kind(monad: str) -> str:
    if monad == "namegen":
        return SET
    from ..monads import get_monad

    return get_monad(monad).kind


def usable(space, kind: str) -> bool:
    """Plain sets are usable under every monad; structured spaces only under their own kind."""
    return space.kind in (SET, kind)


def literal_index(spaces: Mapping[str, object], kind: str | None = None) -> dict[str, list[str]]:
    """Point label -> names of the spaces containing it (restricted to spaces usable at ``kind``)."""
    out: dict[str, list[str]] = {}
    for name in sorted(spaces):
        if kind is not None and not usable(spaces[name], kind):
            continue
        for p in getattr(spaces[name], "points", ()):
            out.setdefault(str(p), []).append(name)
    return out


@dataclass
class Typed:
    """A typechecked term with the solved type of every subterm."""

    term: Term
    type: Type
    ctx: tuple  # ((name, Type), ...)
    monad: str
    types: dict  # id(subterm) -> Type


def typecheck(t: Term, ctx: Mapping[str, Type] | None, monad: str, spaces: Mapping[str, object]) -> Type:
    return typecheck_full(t, ctx, monad, spaces).type


def typecheck_full(t: Term, ctx: Mapping[str, Type] | None, monad: str, spaces: Mapping[str, object]) -> Typed:
    ctx = dict(ctx or {})
    for name, ty in ctx.items():
        _check_bases(ty, spaces, monad)
    chk = Checker(monad, literal_index(spaces, monad_kind(monad)))
    seen: dict = {}
    orig = chk.infer

    def recording(term, c):
        ty = orig(term, c)
        seen[id(term)] = (term, ty)
        return ty

    chk.infer = recording
    ty = chk.infer(t, ctx)
    types = {k: chk.default(v) for k, (_, v) in seen.items()}
    final = chk.default(ty)
    _check_bases(final, spaces, monad)
    return Typed(t, final, tuple(ctx.items()), monad, types)


def _check_bases(ty: Type, spaces: Mapping, monad: str) -> None:
    match ty:
        case Base(name=n):
            if monad == "namegen" and n == NAMES:
                return
            if n not in spaces:
                raise DslTypeError(f"unknown base type {n!r}")
            if not usable(spaces[n], monad_kind(monad)):
                raise DslTypeError(f"space {n!r} is {spaces[n].kind} and cannot be used under {monad}")
        case ProdT(left=a, right=b):
            _check_bases(a, spaces, monad)
            _check_bases(b, spaces, monad)
        case ThunkT(body=b):
            _check_bases(b, spaces, monad)
