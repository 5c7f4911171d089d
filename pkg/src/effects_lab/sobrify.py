"""Equalizers of the unit fork and sober objects.

``DX`` collects the elements ``p`` of ``TX`` with ``eta(p) = T(eta)(p)``.
It is computed by characterization rather than by enumerating ``TX``:

* measure monads: point masses on atoms,
* maybe: ``Just x``; reader: constant readers,
* lower Vietoris: irreducible closed sets.

Points of ``DX`` are the solutions themselves, so ``theta`` is an inclusion.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .core import MEAS, SET, TOP, BaseMap, FinSpace, StructureError, TooLarge, fmt_point, sort_points
from .kleisli import KleisliMorphism, eval_points, is_thunkable
from .monads import Hoare, Maybe, Measure, MeasureMonad, Reader, ReaderVal, Just
from .monads.base import Monad, sample_points
from .report import Record, info, record


@dataclass
class Sobrification:
    DX: FinSpace
    theta: dict
    e: BaseMap
    monad: Monad
    X: FinSpace

    def fmt(self) -> dict:
        T = self.monad
        return {
            "DX": [fmt_point(d) for d in self.DX.points],
            "theta": {fmt_point(d): T.fmt(t) for d, t in self.theta.items()},
            "e": {fmt_point(x): fmt_point(self.e(x)) for x in self.X.points},
        }


def fork_holds(T: Monad, X, p) -> bool:
    TX = T.T(X)
    return T.eta(p, TX) == T.fmap(lambda x: T.eta(x, X), X, TX, p)


def is_irreducible(C: frozenset, X: FinSpace) -> bool:
    """Nonempty and any two points of ``C`` lie below a common point of ``C``."""
    if not C:
        return False
    return all(C & X.up(x) & X.up(y) for x, y in itertools.combinations_with_replacement(sort_points(C), 2))


def irreducible_closed_sets(X: FinSpace) -> list[frozenset]:
    return [C for C in X.closed_sets if is_irreducible(C, X)]


def fork_solutions(X: FinSpace, T: Monad) -> list:
    """Elements of ``TX`` satisfying the fork equation, by characterization."""
    if isinstance(T, MeasureMonad):
        return [Measure({k: 1}) for k in X.mkeys()]
    if isinstance(T, Maybe):
        return [Just(x) for x in X.points]
    if isinstance(T, Reader):
        return [ReaderVal(x, x) for x in X.points]
    if isinstance(T, Hoare):
        return irreducible_closed_sets(X)
    raise StructureError(f"no fork characterization for {T.name}")


def fork_solutions_brute(X: FinSpace, T: Monad, budget: int = 20000, seed: int = 0) -> tuple[list, bool]:
    """Fork solutions among enumerated (or, for infinite ``TX``, sampled) elements."""
    elems, exhaustive = T.elements(X, budget, random.Random(seed))
    return [p for p in elems if fork_holds(T, X, p)], exhaustive


def _space_of_solutions(X: FinSpace, T: Monad, sols: list) -> FinSpace:
    name = f"D{X.name or ''}"
    if T.kind == TOP:
        TX = T.T(X)
        down = {C: frozenset(D for D in sols if TX.leq(D, C)) for C in sols}
        return FinSpace(sols, TOP, down=down, name=name)
    # the evaluation maps separate distinct solutions, so the induced algebra is discrete
    return FinSpace(sols, T.kind, name=name)


def sobrify(X: FinSpace, T: Monad) -> Sobrification:
    sols = fork_solutions(X, T)
    DX = _space_of_solutions(X, T, sols)
    e = BaseMap(X, DX, {x: T.eta(x, X) for x in X.points})
    return Sobrification(DX, {d: d for d in DX.points}, e, T, X)


def d_on_morphism(f: KleisliMorphism, SY: Sobrification | None = None, SZ: Sobrification | None = None) -> BaseMap:
    """The base map ``DY -> DZ`` induced by a thunkable ``f : Y ~> Z``."""
    if not is_thunkable(f):
        raise StructureError(f"{f.fmt()} is not thunkable")
    T, Y, Z = f.monad, f.dom, f.cod
    SY = SY or sobrify(Y, T)
    SZ = SZ or sobrify(Z, T)
    table = {}
    for d in SY.DX.points:
        img = T.bind(SY.theta[d], f, Y, Z)
        if img not in SZ.DX.pointset:
            raise StructureError(f"image {T.fmt(img)} of {fmt_point(d)} is not a fork solution")
        table[d] = img
    return BaseMap(SY.DX, SZ.DX, table)


def is_sober(X: FinSpace, T: Monad, S: Sobrification | None = None) -> bool:
    """``e : X -> DX`` is bijective and its inverse is structure preserving."""
    S = S or sobrify(X, T)
    images = set(S.e.table.values())
    if len(images) != len(X.points) or images != S.DX.pointset:
        return False
    inverse = {d: x for x, d in S.e.table.items()}
    try:
        BaseMap(S.DX, X, inverse)
    except StructureError:
        return False
    return True


def unit_fork_check(X, T: Monad, budget: int = 200, seed: int = 0) -> list[Record]:
    """The fork commutes on ``X``; on ``TX`` the split-equalizer equations also hold."""
    name = getattr(X, "name", None) or "X"
    TX, TTX = T.T(X), T.T(T.T(X))
    xs, xs_ex = eval_points(X, budget, seed)
    bad = next((x for x in xs if not fork_holds(T, X, T.eta(x, X))), None)
    out = [record(f"{T.name}:unit-fork[{name}]", bad is None, None if bad is None else fmt_point(bad), seed, exhaustive=xs_ex)]

    ts, ts_ex = eval_points(TX, budget, seed)
    rs, rs_ex = eval_points(TTX, budget, seed)
    mu_X = lambda r: T.mu(r, X)
    b1 = next((t for t in ts if T.mu(T.eta(t, TX), X) != t), None)
    b2 = next((r for r in rs if T.fmap(mu_X, TTX, TX, T.fmap(lambda t: T.eta(t, TX), TX, TTX, r)) != r), None)
    b3 = next(
        (r for r in rs if T.fmap(mu_X, TTX, TX, T.eta(r, TTX)) != T.eta(T.mu(r, X), TX)),
        None,
    )
    for law, b, ex in (("split-mu-eta", b1, ts_ex), ("split-Tmu-Teta", b2, rs_ex), ("split-Tmu-eta", b3, rs_ex)):
        out.append(record(f"{T.name}:{law}[T{name}]", b is None, None if b is None else T.fmt(b), seed, exhaustive=ex))
    return out


def idempotence_check(X: FinSpace, T: Monad, pairs: int = 10000, seed: int = 0) -> list[Record]:
    """DX is sober, the counit is invertible, and T(theta) is injective."""
    name = X.name or "X"
    S = sobrify(X, T)
    SS = sobrify(S.DX, T)
    out = [
        record(f"{T.name}:DX-sober[{name}]", is_sober(S.DX, T, SS), None, seed, DX=len(S.DX.points), DDX=len(SS.DX.points))
    ]

    # counit DX ~> X composed with pure(e) both ways
    DX, TX = S.DX, T.T(X)
    bad = next((x for x in X.points if S.theta[S.e(x)] != T.eta(x, X)), None)
    bad2 = next(
        (d for d in DX.points if T.fmap(S.e, X, DX, S.theta[d]) != T.eta(d, DX)),
        None,
    )
    witness = None
    if bad is not None:
        witness = f"x={fmt_point(bad)}"
    elif bad2 is not None:
        witness = f"d={fmt_point(bad2)}"
    out.append(record(f"{T.name}:counit-invertible[{name}]", witness is None, witness, seed))

    # T(theta) injective on elements of T(DX)
    theta = lambda d: S.theta[d]
    TDX = T.T(DX)
    rng = random.Random(f"ttheta:{seed}")
    try:
        elems = list(TDX.iter_points(20000))
        images: dict = {}
        collision = None
        for t in elems:
            img = T.fmap(theta, DX, TX, t)
            if img in images and images[img] != t:
                collision = (images[img], t)
                break
            images[img] = t
        mode, n = "exhaustive", len(elems)
    except TooLarge:
        collision = None
        for _ in range(pairs):
            a, b = TDX.random_point(rng), TDX.random_point(rng)
            if a != b and T.fmap(theta, DX, TX, a) == T.fmap(theta, DX, TX, b):
                collision = (a, b)
                break
        mode, n = "sampled", pairs
    out.append(
        record(
            f"{T.name}:T-theta-injective[{name}]",
            collision is None,
            None if collision is None else f"{T.fmt(collision[0])} vs {T.fmt(collision[1])}",
            seed,
            mode=mode,
            cases=n,
        )
    )
    return out


def zero_measure_note(X: FinSpace, T: Monad) -> Record | None:
    """For subprobabilities, report whether the zero measure solves the fork."""
    if isinstance(T, MeasureMonad) and not T.normalized:
        z = Measure()
        return info(f"{T.name}:zero-measure[{X.name or 'X'}]", None, None, in_fork=fork_holds(T, X, z))
    return None


def kolmogorov_closures(X: FinSpace) -> list[frozenset]:
    """Closures of points, one per point of the T0 quotient."""
    return list(sort_points({X.down(x) for x in X.points}))
