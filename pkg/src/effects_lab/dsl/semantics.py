"""Denotations of programs.

One evaluator covers every monad.  It talks to a runtime that supplies
``eta``, ``bind``, the n-ary pairing and the primitives.  The monad runtime
works directly on elements of ``T``; the name-generation runtime works on
stage-indexed name classes and moves the environment along stage inclusions
whenever a computation allocates names.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..core import FinSpace, SET, fmt_point
from ..monads import NOTHING, Measure, ReaderVal, get_monad
from ..monads.base import KleisliMorphism, Monad, prod
from ..namegen import (
    DEFAULT_BOUND,
    ConstObject,
    Name,
    NameClass,
    NamesObject,
    ProdStaged,
    TObject,
    ng_fmap,
    ng_mu,
    ng_nabla_many,
    ng_observe_n,
)
from ..observe import observe_n, power_obj
from .syntax import (
    Ask,
    Fail,
    Flip,
    Force,
    Fresh,
    Fst,
    Let,
    Lit,
    Or,
    Pair,
    Return,
    Sample,
    Snd,
    Term,
    Thunk,
    UnitV,
    Var,
)
from .syntax import free_vars
from .types import NAMES, Base, DslTypeError, ProdT, ThunkT, Type, Typed, UnitT, fmt_type, typecheck_full


class MonadRuntime:
    def __init__(self, T: Monad, spaces: Mapping[str, FinSpace]):
        self.T = T
        self.spaces = spaces

    def obj(self, ty: Type):
        match ty:
            case Base(name=n):
                X = self.spaces[n]
                return X.as_kind(self.T.kind) if X.kind == SET else X
            case UnitT():
                return self.T.unit_object()
            case ProdT(left=a, right=b):
                return prod((self.obj(a), self.obj(b)))
            case ThunkT(body=b):
                return self.T.T(self.obj(b))
        raise TypeError(ty)

    def eta(self, v, ty, stage):
        return self.T.eta(v, self.obj(ty))

    def bind(self, t, ty_a, h, ty_b, stage, env, env_tys):
        return self.T.bind(t, lambda v: h(v, stage, env), self.obj(ty_a), self.obj(ty_b))

    def fmap(self, f, ty_a, ty_b, t, stage):
        return self.T.fmap(f, self.obj(ty_a), self.obj(ty_b), t)

    def pair(self, elems, tys, stage):
        return self.T.nabla_many(elems, tuple(self.obj(ty) for ty in tys))

    def primitive(self, t: Term, ty: Type, stage, branches=()):
        T = self.T
        X = self.obj(ty)
        match t:
            case Sample(weights=ws):
                acc: dict = {}
                for label, q in ws:
                    k = X.mkey(label)
                    acc[k] = acc.get(k, 0) + Fraction(q)
                return Measure(acc)
            case Flip(prob=q):
                return Measure({X.mkey("tt"): q, X.mkey("ff"): 1 - q})
            case Fail():
                return NOTHING if T.name == "maybe" else Measure()
            case Ask():
                # the two environments read as ff and tt
                return ReaderVal("ff", "tt")
            case Or():
                return frozenset().union(*branches)
        raise TypeError(f"{type(t).__name__} has no interpretation under {T.name}")


class NamegenRuntime:
    """Computations are name classes; ``stage`` is the number of names in scope."""

    def __init__(self, spaces: Mapping[str, FinSpace], bound: int = DEFAULT_BOUND):
        self.spaces = spaces
        self.bound = bound
        self._objs: dict = {}

    def obj(self, ty: Type):
        if ty not in self._objs:
            self._objs[ty] = self._build(ty)
        return self._objs[ty]

    def _build(self, ty: Type):
        match ty:
            case Base(name=n) if n == NAMES:
                return NamesObject(self.bound)
            case Base(name=n):
                return ConstObject(self.spaces[n].points, name=n, bound=self.bound)
            case UnitT():
                return ConstObject([()], name="1", bound=self.bound)
            case ProdT(left=a, right=b):
                return ProdStaged((self.obj(a), self.obj(b)))
            case ThunkT(body=b):
                return TObject(self.obj(b), self.bound)
        raise TypeError(ty)

    def tobj(self, ty: Type) -> TObject:
        return TObject(self.obj(ty), self.bound)

    def eta(self, v, ty, stage):
        return NameClass(stage, 0, v)

    def bind(self, t: NameClass, ty_a, h, ty_b, stage, env, env_tys):
        inner_stage = stage + t.block
        moved = self.lift_env(env, env_tys, stage, inner_stage)
        r = h(t.value, inner_stage, moved)
        return self.tobj(ty_b).normalize(stage, t.block + r.block, r.value)

    def lift_env(self, env: dict, env_tys: dict, src: int, dst: int) -> dict:
        if src == dst:
            return env
        ident = {i: i for i in range(src)}
        return {x: self.obj(env_tys[x]).rename(v, ident, src, dst) for x, v in env.items()}

    def fmap(self, f, ty_a, ty_b, t, stage):
        return ng_fmap(lambda m, v: f(v), self.tobj(ty_a), self.tobj(ty_b), stage, t)

    def pair(self, elems, tys, stage):
        TP = TObject(ProdStaged(tuple(self.obj(ty) for ty in tys)), self.bound)
        return ng_nabla_many(tuple(self.tobj(ty) for ty in tys), stage, elems, TP)

    def primitive(self, t: Term, ty: Type, stage, branches=()):
        if isinstance(t, Fresh):
            return self.tobj(ty).normalize(stage, 1, Name(stage))
        raise TypeError(f"{type(t).__name__} has no interpretation under namegen")


class Evaluator:
    def __init__(self, typed: Typed, runtime):
        self.typed = typed
        self.rt = runtime

    def ty(self, t: Term) -> Type:
        return self.typed.types[id(t)]

    def ev(self, t: Term, env: dict, tys: dict, stage):
        rt = self.rt
        match t:
            case Var(name=n):
                return rt.eta(env[n], tys[n], stage)
            case Lit(label=l):
                if l in env:
                    return rt.eta(env[l], tys[l], stage)
                return rt.eta(l, self.ty(t), stage)
            case UnitV():
                return rt.eta((), UnitT(), stage)
            case Pair(left=a, right=b):
                return rt.pair((self.ev(a, env, tys, stage), self.ev(b, env, tys, stage)), (self.ty(a), self.ty(b)), stage)
            case Fst(body=b):
                return rt.fmap(lambda z: z[0], self.ty(b), self.ty(t), self.ev(b, env, tys, stage), stage)
            case Snd(body=b):
                return rt.fmap(lambda z: z[1], self.ty(b), self.ty(t), self.ev(b, env, tys, stage), stage)
            case Let(var=x, bound=a, body=b):
                ta = self.ty(a)
                inner_tys = {**tys, x: ta}

                def cont(v, st, moved):
                    return self.ev(b, {**moved, x: v}, inner_tys, st)

                return rt.bind(self.ev(a, env, tys, stage), ta, cont, self.ty(t), stage, env, tys)
            case Return(body=b):
                return self.ev(b, env, tys, stage)
            case Thunk(body=b):
                return rt.eta(self.ev(b, env, tys, stage), self.ty(t), stage)
            case Force(body=b):
                return rt.bind(self.ev(b, env, tys, stage), self.ty(b), lambda v, st, moved: v, self.ty(t), stage, env, tys)
            case Or(branches=bs):
                return rt.primitive(t, self.ty(t), stage, [self.ev(c, env, tys, stage) for c in bs])
            case Sample() | Flip() | Fail() | Ask() | Fresh():
                return rt.primitive(t, self.ty(t), stage)
        raise TypeError(f"cannot evaluate {t!r}")


class StagedDenotation:
    """Denotation under name generation: a name class at each stage, for closed programs."""

    def __init__(self, typed: Typed, runtime: NamegenRuntime):
        self.typed = typed
        self.runtime = runtime
        self.cod = runtime.obj(typed.type)

    def at(self, stage: int = 0, env: dict | None = None) -> NameClass:
        tys = dict(self.typed.ctx)
        return Evaluator(self.typed, self.runtime).ev(self.typed.term, dict(env or {}), tys, stage)

    def __call__(self, x=()):
        return self.at(0)


def denote(
    t: Term,
    monad: str | Monad,
    spaces: Mapping[str, FinSpace],
    ctx: Mapping[str, Type] | None = None,
    bound: int = DEFAULT_BOUND,
    typed: Typed | None = None,
):
    """A Kleisli morphism from the context object to the type's object.

    The context object is the product of the context types in the given order
    (the unit object when empty); its points are tuples of values.
    """
    name = monad if isinstance(monad, str) else monad.name
    typed = typed or typecheck_full(t, ctx, name, spaces)
    if name == "namegen":
        return StagedDenotation(typed, NamegenRuntime(spaces, bound))
    T = get_monad(name)
    rt = MonadRuntime(T, spaces)
    names = [x for x, _ in typed.ctx]
    tys = dict(typed.ctx)
    dom = T.unit_object() if not names else prod(tuple(rt.obj(tys[x]) for x in names))
    cod = rt.obj(typed.type)
    ev = Evaluator(typed, rt)
    if not names:
        fn = lambda point: ev.ev(typed.term, {}, tys, None)
    else:
        fn = lambda point: ev.ev(typed.term, dict(zip(names, point)), tys, None)
    return KleisliMorphism(T, dom, cod, fn, name="program")


def program_type(t: Term, monad: str, spaces: Mapping[str, FinSpace], ctx=None) -> Type:
    return typecheck_full(t, ctx, monad, spaces).type


# ---------------------------------------------------------------------------
# testing contexts


def context_term(M: Term, n: int, var: str = "m") -> Term:
    """``let m = M in (force m, (force m, ...))``: run the thunk ``n`` times."""
    while var in free_vars(M):
        var += "'"
    pos = M.pos
    if n == 0:
        body: Term = UnitV(pos)
    else:
        body = Force(pos, Var(pos, var))
        for _ in range(n - 1):
            body = Pair(pos, Force(pos, Var(pos, var)), body)
    return Let(pos, var, M, body)


def _flatten(z, n: int):
    if n == 0:
        return ()
    out = []
    for _ in range(n - 1):
        out.append(z[0])
        z = z[1]
    out.append(z)
    return tuple(out)


def run_context_n(
    M: Term, n: int, monad: str, spaces: Mapping[str, FinSpace], bound: int = DEFAULT_BOUND
):
    """Evaluate the testing context around the closed thunk ``M``, as an element of ``T(tau^n)``."""
    typed = typecheck_full(M, None, monad, spaces)
    if not isinstance(typed.type, ThunkT):
        raise DslTypeError(f"testing contexts need a thunked program, got {fmt_type(typed.type)}")
    inner = typed.type.body
    C = context_term(M, n)
    ctyped = typecheck_full(C, None, monad, spaces)
    if monad == "namegen":
        rt = NamegenRuntime(spaces, bound)
        raw = Evaluator(ctyped, rt).ev(C, {}, {}, 0)
        Xn = ProdStaged((rt.obj(inner),) * n)
        return ng_fmap(lambda m, z: _flatten(z, n), rt.tobj(ctyped.type), TObject(Xn, bound), 0, raw)
    T = get_monad(monad)
    rt = MonadRuntime(T, spaces)
    raw = Evaluator(ctyped, rt).ev(C, {}, {}, None)
    return T.fmap(lambda z: _flatten(z, n), rt.obj(ctyped.type), power_obj(T, rt.obj(inner), n), raw)


def observe_program(M: Term, n: int, monad: str, spaces: Mapping[str, FinSpace], bound: int = DEFAULT_BOUND):
    """``observe_n`` applied to the outer element that ``M`` denotes."""
    typed = typecheck_full(M, None, monad, spaces)
    if monad == "namegen":
        rt = NamegenRuntime(spaces, bound)
        rho = StagedDenotation(typed, rt).at(0)
        return ng_observe_n(rt.tobj(typed.type), 0, rho, n)
    T = get_monad(monad)
    rt = MonadRuntime(T, spaces)
    rho = denote(M, T, spaces, typed=typed)(())
    return observe_n(T, rho, rt.obj(typed.type.body), n)


def fmt_element(monad: str, t) -> str:
    if monad == "namegen":
        return t.fmt()
    return get_monad(monad).fmt(t)
