"""Copy/discard structure, thunk/force structure and morphism classifiers.

For a commutative monad the Kleisli category has copy and delete maps on
every object and a thunk/force structure with ``L = T``.  A morphism is

* pure when it factors as ``eta . g`` for a base map ``g`` (all such ``g``
  are returned as witnesses),
* thunkable when ``eta_TB . f = T(eta_B) . f``,
* copyable / discardable when it commutes with copy / delete,
* deterministic when it is both.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import MEAS, SET, TOP, BaseMap, FinSpace, TooLarge, all_maps, fmt_point, preserves_structure, unit_space
from .monads.base import (
    KleisliMorphism,
    Monad,
    TObj,
    eta_morphism,
    kleisli_compose,
    prod,
    pure,
    sample_points,
)
from .report import Record, record

PURE_ENUM_BOUND = 6
PURE_ENUM_MAPS = 5000


class ChainViolation(AssertionError):
    """pure => thunkable => deterministic failed; never expected."""


# ---------------------------------------------------------------------------
# CD structure


def identity(T: Monad, X) -> KleisliMorphism:
    return eta_morphism(T, X)


def copy(T: Monad, X) -> KleisliMorphism:
    XX = prod((X, X))
    return KleisliMorphism(T, X, XX, lambda x: T.eta((x, x), XX), name="copy")


def delete(T: Monad, X) -> KleisliMorphism:
    one = T.unit_object()
    return KleisliMorphism(T, X, one, lambda x: T.eta((), one), name="del")


def tensor(f: KleisliMorphism, g: KleisliMorphism) -> KleisliMorphism:
    T = f.monad
    dom, cod = prod((f.dom, g.dom)), prod((f.cod, g.cod))
    return KleisliMorphism(T, dom, cod, lambda z: T.nabla(f(z[0]), g(z[1]), f.cod, g.cod))


def base_morphism(T: Monad, dom, cod, g: Callable, name=None) -> KleisliMorphism:
    return pure(T, dom, cod, g, name=name)


# ---------------------------------------------------------------------------
# thunk / force


def thunk(T: Monad, A) -> KleisliMorphism:
    TA = T.T(A)
    return KleisliMorphism(T, A, TA, lambda a: T.eta(T.eta(a, A), TA), name="thunk")


def force(T: Monad, A) -> KleisliMorphism:
    return KleisliMorphism(T, T.T(A), A, lambda t: t, name="force")


def L(f: KleisliMorphism) -> KleisliMorphism:
    """The functor part: ``t |-> eta(mu(T f (t)))``."""
    T = f.monad
    TA, TB = T.T(f.dom), T.T(f.cod)

    def fn(t):
        return T.eta(T.bind(t, f, f.dom, f.cod), TB)

    return KleisliMorphism(T, TA, TB, fn, name=f"L({f.name or 'f'})")


# ---------------------------------------------------------------------------
# evaluation points


def eval_points(obj, budget: int = 200, seed: int = 0) -> tuple[list, bool]:
    """Points on which morphism equalities are tested: all of them when few."""
    return sample_points(obj, budget, random.Random(f"pts:{seed}"))


def equal_on(f: KleisliMorphism, g: KleisliMorphism, points: Iterable):
    """First point where ``f`` and ``g`` differ, or ``None``."""
    return f.agree_on(g, points)


# ---------------------------------------------------------------------------
# classifiers


def _witness_map(dom, cod, table: dict) -> BaseMap:
    return BaseMap(dom, cod, table, check=False)


def is_pure(f: KleisliMorphism, bound: int = PURE_ENUM_BOUND, points: Sequence | None = None) -> list[BaseMap]:
    """Every base map ``g`` with ``eta . g = f``; empty when ``f`` is not pure."""
    T, X, Y = f.monad, f.dom, f.cod
    if (
        points is None
        and isinstance(X, FinSpace)
        and isinstance(Y, FinSpace)
        and len(X) <= bound
        and len(Y) <= bound
        and len(Y) ** len(X) <= PURE_ENUM_MAPS
    ):
        return [g for g in all_maps(X, Y) if all(T.eta(g(x), Y) == f(x) for x in X.points)]
    return pure_witnesses_by_fibers(f, points)


def pure_witnesses_by_fibers(f: KleisliMorphism, points: Sequence | None = None, limit: int = 4096) -> list[BaseMap]:
    """Solve ``eta(g x) = f x`` pointwise through the fibres of ``eta``."""
    T, X, Y = f.monad, f.dom, f.cod
    xs = list(X.iter_points() if points is None else points)
    ys = list(Y.iter_points())
    by_value: dict = {}
    for y in ys:
        by_value.setdefault(T.eta(y, Y), []).append(y)
    fibers = []
    for x in xs:
        fib = by_value.get(f(x))
        if not fib:
            return []
        fibers.append(fib)
    out = []
    for choice in itertools.product(*fibers):
        table = dict(zip(xs, choice))
        if points is not None or preserves_structure_any(X, Y, table):
            out.append(_witness_map(X, Y, table))
            if len(out) >= limit:
                break
    return out


def preserves_structure_any(X, Y, table: dict) -> bool:
    if isinstance(X, FinSpace) and isinstance(Y, FinSpace):
        return preserves_structure(X, Y, table)
    from .monads.base import is_morphism

    return is_morphism(X, Y, table.__getitem__)


def thunkable_failure(f: KleisliMorphism, points: Iterable | None = None):
    """First point where ``eta_TB . f`` and ``T(eta_B) . f`` differ, or ``None``."""
    T, Y = f.monad, f.cod
    TY = T.T(Y)
    pts = f.dom.iter_points() if points is None else points
    for x in pts:
        t = f(x)
        if T.eta(t, TY) != T.fmap(lambda y: T.eta(y, Y), Y, TY, t):
            return x
    return None


def is_thunkable(f: KleisliMorphism, points: Iterable | None = None) -> bool:
    return thunkable_failure(f, points) is None


def copyable_failure(f: KleisliMorphism, points: Iterable | None = None):
    lhs = kleisli_compose(copy(f.monad, f.cod), f)
    rhs = kleisli_compose(tensor(f, f), copy(f.monad, f.dom))
    return lhs.agree_on(rhs, f.dom.iter_points() if points is None else points)


def discardable_failure(f: KleisliMorphism, points: Iterable | None = None):
    lhs = kleisli_compose(delete(f.monad, f.cod), f)
    rhs = delete(f.monad, f.dom)
    return lhs.agree_on(rhs, f.dom.iter_points() if points is None else points)


def is_copyable(f: KleisliMorphism, points=None) -> bool:
    return copyable_failure(f, points) is None


def is_discardable(f: KleisliMorphism, points=None) -> bool:
    return discardable_failure(f, points) is None


def is_deterministic(f: KleisliMorphism, points=None) -> bool:
    return is_copyable(f, points) and is_discardable(f, points)


@dataclass
class Classification:
    pure: list = field(default_factory=list)
    thunkable: bool = False
    copyable: bool = False
    discardable: bool = False

    @property
    def deterministic(self) -> bool:
        return self.copyable and self.discardable

    @property
    def is_pure(self) -> bool:
        return bool(self.pure)

    @property
    def uniquely_pure(self) -> bool:
        return len(self.pure) == 1

    def chain_holds(self) -> bool:
        return (not self.is_pure or self.thunkable) and (not self.thunkable or self.deterministic)

    def to_dict(self) -> dict:
        return {
            "pure": self.is_pure,
            "witnesses": [g.fmt() for g in self.pure],
            "thunkable": self.thunkable,
            "copyable": self.copyable,
            "discardable": self.discardable,
            "deterministic": self.deterministic,
        }


def classify(f: KleisliMorphism, points: Sequence | None = None, strict: bool = True) -> Classification:
    c = Classification(
        pure=is_pure(f, points=points),
        thunkable=is_thunkable(f, points),
        copyable=is_copyable(f, points),
        discardable=is_discardable(f, points),
    )
    if strict and not c.chain_holds():
        raise ChainViolation(f"inclusion chain violated by {f.fmt()}: {c.to_dict()}")
    return c


# ---------------------------------------------------------------------------
# random morphisms


def random_base_map(X: FinSpace, Y: FinSpace, rng: random.Random) -> dict:
    if Y.kind == SET or X.kind == SET and Y.kind == SET:
        return {x: Y.random_point(rng) for x in X.points}
    if Y.kind == MEAS:
        table = {}
        for a in X.atoms:
            y = Y.random_point(rng)
            table.update({x: y for x in a})
        return table
    maps = list(itertools.islice(all_maps(X, Y), 4096))
    return maps[rng.randrange(len(maps))].table


def random_kernel(T: Monad, X: FinSpace, Y: FinSpace, rng: random.Random, mode: str | None = None) -> KleisliMorphism:
    """A random Kleisli morphism; ``mode`` is ``pure``, ``general`` or ``None`` (mixed)."""
    mode = mode or rng.choice(("pure", "general", "general", "general"))
    if mode == "pure":
        g = random_base_map(X, Y, rng)
        return KleisliMorphism(T, X, Y, {x: T.eta(g[x], Y) for x in X.points}, name="k")
    TY = T.T(Y)
    if X.kind == MEAS:
        table = {}
        for a in X.atoms:
            t = TY.random_point(rng)
            table.update({x: t for x in a})
    elif X.kind == TOP:
        raw = {x: TY.random_point(rng) for x in X.points}
        # monotone hull: union over everything below
        table = {x: TY.inner.closure(frozenset().union(*(raw[y] for y in X.down(x)))) for x in X.points}
    else:
        table = {x: TY.random_point(rng) for x in X.points}
    return KleisliMorphism(T, X, Y, table, name="k")


def all_kernels(T: Monad, X: FinSpace, Y: FinSpace, limit: int = 20000) -> Iterable[KleisliMorphism]:
    """Every Kleisli morphism ``X ~> Y`` for monads with finite ``TY``."""
    TY = T.T(Y)
    elems = list(TY.iter_points(limit))
    if len(elems) ** len(X.points) > limit:
        raise TooLarge("homset too large to enumerate")
    for vals in itertools.product(elems, repeat=len(X.points)):
        table = dict(zip(X.points, vals))
        if preserves_structure_any(X, TY, table) if X.kind != SET else True:
            yield KleisliMorphism(T, X, Y, table, name="k")


# ---------------------------------------------------------------------------
# suites


def cd_laws(T: Monad, X, budget: int = 200, seed: int = 0) -> list[Record]:
    pts, exhaustive = eval_points(X, budget, seed)
    c = copy(T, X)
    idX = identity(T, X)
    name = getattr(X, "name", None) or "X"
    one = T.unit_object()
    XX = prod((X, X))

    left = kleisli_compose(tensor(delete(T, X), idX), c)
    right = kleisli_compose(tensor(idX, delete(T, X)), c)
    lhs_counit = pure(T, X, prod((one, X)), lambda x: ((), x))
    rhs_counit = pure(T, X, prod((X, one)), lambda x: (x, ()))
    bad_counit = left.agree_on(lhs_counit, pts) or right.agree_on(rhs_counit, pts)

    swap = pure(T, XX, XX, lambda z: (z[1], z[0]))
    bad_comm = kleisli_compose(swap, c).agree_on(c, pts)

    XX_X, X_XX = prod((XX, X)), prod((X, XX))
    assoc = pure(T, XX_X, X_XX, lambda z: (z[0][0], (z[0][1], z[1])))
    lhs = kleisli_compose(assoc, kleisli_compose(tensor(c, idX), c))
    rhs = kleisli_compose(tensor(idX, c), c)
    bad_assoc = lhs.agree_on(rhs, pts)

    out = []
    for law, bad in (("counit", bad_counit), ("cocommutativity", bad_comm), ("coassociativity", bad_assoc)):
        out.append(
            record(
                f"{T.name}:cd-{law}[{name}]",
                bad is None,
                None if bad is None else fmt_point(bad),
                seed,
                cases=len(pts),
                exhaustive=exhaustive,
            )
        )
    return out


def _test_kernels(T: Monad, A, n: int, rng: random.Random) -> list[KleisliMorphism]:
    """Kernels ``A ~> B`` used to instantiate axioms that quantify over morphisms."""
    out = [identity(T, A)]
    if isinstance(A, FinSpace):
        for mode in ("pure", "general"):
            for _ in range(n):
                out.append(random_kernel(T, A, A, rng, mode))
    return out


def thunk_force_axioms(T: Monad, A, budget: int = 120, seed: int = 0, kernels: int = 3) -> list[Record]:
    """The five thunk/force axioms on ``A``, with axioms 1 and 2 over sample kernels."""
    rng = random.Random(f"tf:{seed}:{T.name}")
    name = getattr(A, "name", None) or "A"
    TA = T.T(A)
    a_pts, a_ex = eval_points(A, budget, seed)
    ta_pts, ta_ex = eval_points(TA, budget, seed)
    fs = _test_kernels(T, A, kernels, rng)
    out = []

    def rec(axiom, bad, cases, exhaustive):
        out.append(
            record(
                f"{T.name}:thunk-force-{axiom}[{name}]",
                bad is None,
                None if bad is None else T.fmt(bad) if not isinstance(bad, str) else bad,
                seed,
                cases=cases,
                exhaustive=exhaustive,
            )
        )

    # 1. force is natural: f . force_A = force_B . L f
    bad = None
    for f in fs:
        bad = kleisli_compose(f, force(T, A)).agree_on(kleisli_compose(force(T, f.cod), L(f)), ta_pts)
        if bad is not None:
            break
    rec("force-natural", bad, len(fs) * len(ta_pts), False)

    # 2. thunk_L is natural: thunk_LB . L f = L L f . thunk_LA
    bad = None
    for f in fs:
        lhs = kleisli_compose(thunk(T, T.T(f.cod)), L(f))
        rhs = kleisli_compose(L(L(f)), thunk(T, TA))
        bad = lhs.agree_on(rhs, ta_pts)
        if bad is not None:
            break
    rec("thunk-natural", bad, len(fs) * len(ta_pts), False)

    # 3. L thunk . thunk = thunk_L . thunk
    th = thunk(T, A)
    bad = kleisli_compose(L(th), th).agree_on(kleisli_compose(thunk(T, TA), th), a_pts)
    rec("thunk-thunk", bad, len(a_pts), a_ex)

    # 4. force . thunk = id
    bad = kleisli_compose(force(T, A), th).agree_on(identity(T, A), a_pts)
    rec("force-thunk", bad, len(a_pts), a_ex)

    # 5. L force . thunk_L = id
    bad = kleisli_compose(L(force(T, A)), thunk(T, TA)).agree_on(identity(T, TA), ta_pts)
    rec("Lforce-thunk", bad, len(ta_pts), ta_ex)
    return out


def inclusion_chain(kernels: Iterable[KleisliMorphism], seed: int | None = None, label: str = "") -> Record:
    """pure => thunkable => deterministic on every kernel; counts each class."""
    counts = {"kernels": 0, "pure": 0, "thunkable": 0, "deterministic": 0}
    bad = None
    monad = None
    for k in kernels:
        monad = k.monad
        c = classify(k, strict=False)
        counts["kernels"] += 1
        counts["pure"] += c.is_pure
        counts["thunkable"] += c.thunkable
        counts["deterministic"] += c.deterministic
        if bad is None and not c.chain_holds():
            bad = k.fmt()
    name = monad.name if monad else "?"
    return record(f"{name}:inclusion-chain{label}", bad is None, bad, seed, **counts)


def thunkable_closure(T: Monad, X: FinSpace, n: int = 20, seed: int = 0) -> Record:
    """thunk and every L f are thunkable and thunkable maps compose."""
    rng = random.Random(f"tc:{seed}:{T.name}")
    pts_T, _ = eval_points(T.T(X), 60, seed)
    bad = None
    if not is_thunkable(thunk(T, X)):
        bad = "thunk"
    ks = [random_kernel(T, X, X, rng) for _ in range(n)]
    for k in ks:
        if bad is None and not is_thunkable(L(k), pts_T):
            bad = f"L({k.fmt()})"
    th = [k for k in ks if is_thunkable(k)]
    for f, g in itertools.product(th, repeat=2):
        if bad is None and not is_thunkable(kleisli_compose(g, f)):
            bad = f"{g.fmt()} after {f.fmt()}"
    return record(f"{T.name}:thunkable-closure[{X.name or 'X'}]", bad is None, bad, seed, thunkable_kernels=len(th))


def retractions(g: KleisliMorphism, limit: int = 20000) -> list[KleisliMorphism]:
    """Left inverses ``r`` of ``g`` (``r . g = id``) found by search.

    Finite monads search the whole homset when it is small; measure monads
    search only retractions whose values are point masses.
    """
    T, Y, Z = g.monad, g.dom, g.cod
    idY = identity(T, Y)
    try:
        cands = list(all_kernels(T, Z, Y, limit))
    except TooLarge:
        cands = [KleisliMorphism(T, Z, Y, {z: T.eta(m[z], Y) for z in Z.points}) for m in (h.table for h in all_maps(Z, Y))]
    return [r for r in cands if kleisli_compose(r, g) == idY]


def cancellation_checks(T: Monad, X: FinSpace, Y: FinSpace, Z: FinSpace, n: int = 40, seed: int = 0) -> list[Record]:
    """If g.f and g are discardable so is f; if g.f, g copyable and g split monic then f is copyable."""
    rng = random.Random(f"gfg:{seed}:{T.name}")
    bad_disc = bad_copy = None
    hits = {"discardable_premise": 0, "copyable_premise": 0}
    small = len(Y) <= 4 and len(Z) <= 4
    for _ in range(n):
        f = random_kernel(T, X, Y, rng)
        g = random_kernel(T, Y, Z, rng, rng.choice(("pure", "general")))
        gf = kleisli_compose(g, f)
        if is_discardable(gf) and is_discardable(g):
            hits["discardable_premise"] += 1
            if not is_discardable(f) and bad_disc is None:
                bad_disc = f"f={f.fmt()} g={g.fmt()}"
        if small and is_copyable(gf) and is_copyable(g) and retractions(g):
            hits["copyable_premise"] += 1
            if not is_copyable(f) and bad_copy is None:
                bad_copy = f"f={f.fmt()} g={g.fmt()}"
    return [
        record(f"{T.name}:gfg-discardable", bad_disc is None, bad_disc, seed, premises=hits["discardable_premise"]),
        record(f"{T.name}:gfg-copyable", bad_copy is None, bad_copy, seed, premises=hits["copyable_premise"]),
    ]
