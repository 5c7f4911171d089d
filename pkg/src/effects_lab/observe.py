"""Repeated-sampling observations and observational equivalence.

``observe_n`` sends an outer element ``rho`` of ``TTX`` to the mixture over
inner elements ``p`` of the n-fold monoidal power of ``p``, an element of
``T(X^n)``.  Two outer elements are observationally equivalent up to ``n``
when all their observations up to ``n`` agree.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core import FinSpace, StructureError, TooLarge, fmt_point, point_key
from .kleisli import KleisliMorphism, classify
from .monads import Hoare, Measure, MeasureMonad
from .monads.base import Monad, prod
from .report import Record, info, record

EQUAL = "equal-up-to-bound"
DISTINGUISHED = "distinguished"


def power_obj(T: Monad, X, n: int):
    return T.unit_object() if n == 0 else prod((X,) * n)


def observe_n(T: Monad, rho, X, n: int):
    """``mu . T(nabla_n . diagonal_n)`` applied to ``rho``: an element of ``T(X^n)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    TX = T.T(X)
    Xn = power_obj(T, X, n)
    objs = (X,) * n
    return T.bind(rho, lambda p: T.nabla_many((p,) * n, objs), TX, Xn)


@dataclass
class DistinguishReport:
    verdict: str
    n: int | None
    witness: tuple | None
    n_max: int

    @property
    def distinguished(self) -> bool:
        return self.verdict == DISTINGUISHED

    def fmt_verdict(self) -> str:
        return f"{DISTINGUISHED}-at-{self.n}" if self.distinguished else EQUAL


def distinguish(T: Monad, rho, rho2, X, n_max: int) -> DistinguishReport:
    """Least ``n <= n_max`` whose observations differ."""
    for n in range(n_max + 1):
        a, b = observe_n(T, rho, X, n), observe_n(T, rho2, X, n)
        if a != b:
            return DistinguishReport(DISTINGUISHED, n, (T.fmt(a), T.fmt(b)), n_max)
    return DistinguishReport(EQUAL, None, None, n_max)


def signature(T: Monad, rho, X, n: int) -> tuple:
    return tuple(observe_n(T, rho, X, k) for k in range(n + 1))


def brute_observationality(X, T: Monad, n_max: int = 3, limit: int = 5000) -> Record:
    """Injectivity of ``(observe_0, ..., observe_n)`` on all of ``TTX``; least sufficient ``n``."""
    TTX = T.T(T.T(X))
    name = getattr(X, "name", None) or "X"
    elems = list(TTX.iter_points(limit))
    obs = {rho: [] for rho in elems}
    collision = None
    for n in range(n_max + 1):
        for rho in elems:
            obs[rho].append(observe_n(T, rho, X, n))
        seen: dict = {}
        collision = None
        for rho in elems:
            key = tuple(obs[rho])
            if key in seen:
                collision = (seen[key], rho)
                break
            seen[key] = rho
        if collision is None:
            return record(
                f"{T.name}:observational-exhaustive[{name}]",
                True,
                None,
                None,
                mode="proved by enumeration",
                elements=len(elems),
                least_n=n,
            )
    return record(
        f"{T.name}:observational-exhaustive[{name}]",
        False,
        f"{T.fmt(collision[0])} vs {T.fmt(collision[1])}",
        None,
        mode="proved by enumeration",
        elements=len(elems),
        least_n=None,
    )


def _perturbed_pair(T: MeasureMonad, rho: Measure, X: FinSpace, rng: random.Random) -> Measure | None:
    """Replace one inner measure ``p`` by an even mixture of ``p + d`` and ``p - d``: same mean, new moments."""
    cands = [(p, w) for p, w in rho.items if len(p.items) >= 2]
    if not cands:
        return None
    p, w = cands[rng.randrange(len(cands))]
    (a, pa), (b, pb) = rng.sample(p.items, 2)
    d = min(pa, pb) * Fraction(rng.randint(1, 4), 4)
    plus = Measure({**dict(p.items), a: p[a] + d, b: p[b] - d})
    minus = Measure({**dict(p.items), a: p[a] - d, b: p[b] + d})
    if plus == minus:
        return None
    rest = {q: v for q, v in rho.items if q != p}
    rest[plus] = rest.get(plus, 0) + w / 2
    rest[minus] = rest.get(minus, 0) + w / 2
    return Measure(rest)


def random_outer_pair(T: MeasureMonad, X: FinSpace, rng: random.Random) -> tuple[Measure, Measure]:
    TX = T.T(X)
    while True:
        rho = T.random_element(TX, rng)
        if rng.random() < 0.5:
            rho2 = _perturbed_pair(T, rho, X, rng) if rho.items else None
        else:
            rho2 = T.random_element(TX, rng)
        if rho2 is not None and rho2 != rho:
            return rho, rho2


def sampled_observationality(
    T: MeasureMonad, spaces: Sequence[FinSpace], pairs: int = 10000, seed: int = 0
) -> Record:
    """Random distinct outer pairs, each tested up to the total size of the two supports."""
    rng = random.Random(seed)
    # a one-point space has a single outer element, so there is no pair to draw
    spaces = [X for X in spaces if T.accepts(X) and len(X.points) >= 2]
    hist: dict = {}
    failure = None
    for i in range(pairs):
        X = spaces[i % len(spaces)]
        rho, rho2 = random_outer_pair(T, X, rng)
        bound = len(rho.items) + len(rho2.items)
        rep = distinguish(T, rho, rho2, X, bound)
        if not rep.distinguished:
            failure = f"{T.fmt(rho)} vs {T.fmt(rho2)} on {X.name}"
            break
        hist[rep.n] = hist.get(rep.n, 0) + 1
    return record(
        f"{T.name}:observational-sampled",
        failure is None,
        failure,
        seed,
        mode="sampled (no counterexample found)" if failure is None else "sampled",
        pairs=pairs if failure is None else i + 1,
        least_n_histogram={str(k): v for k, v in sorted(hist.items())},
    )


# ---------------------------------------------------------------------------
# the monoid route


def epsilon_integral(T: Monad, h: Callable, p, X):
    """Integral of ``h`` against ``p``: an expectation for measures, a hitting test for closed sets."""
    if isinstance(T, MeasureMonad):
        total = Fraction(0)
        for k, w in p.items:
            v = Fraction(h(X.mrep(k)))
            if not 0 <= v <= 1:
                raise StructureError(f"integrand value {v} outside the unit interval")
            total += w * v
        return total
    if isinstance(T, Hoare):
        U = frozenset(x for x in X.points if h(x))
        if not X.is_open(U):
            raise StructureError(f"{fmt_point(U)} is not open, so its indicator is not continuous into S")
        return int(bool(p & U))
    raise StructureError(f"{T.name} has no result algebra for the monoid route")


def monoid_test(T: Monad, rho, hs: Sequence[Callable], X, cross_check: bool = False):
    """Outer integral of the pointwise product of the inner integrals of ``hs``."""
    TX = T.T(X)
    if isinstance(T, MeasureMonad):
        value = Fraction(0)
        for q, w in rho.items:
            prodv = Fraction(1)
            for h in hs:
                prodv *= epsilon_integral(T, h, q, X)
            value += w * prodv
    elif isinstance(T, Hoare):
        value = int(any(all(epsilon_integral(T, h, C, X) for h in hs) for C in rho))
    else:
        raise StructureError(f"{T.name} has no result algebra for the monoid route")
    if cross_check:
        n = len(hs)
        obs = observe_n(T, rho, X, n)
        Xn = power_obj(T, X, n)

        def joint(z):
            if n == 0:
                return 1
            out = Fraction(1) if isinstance(T, MeasureMonad) else 1
            for h, c in zip(hs, z):
                out = out * h(c) if isinstance(T, MeasureMonad) else out and h(c)
            return out

        if isinstance(T, MeasureMonad):
            other = sum((w * Fraction(joint(Xn.mrep(k))) for k, w in obs.items), Fraction(0))
        else:
            other = int(any(joint(z) for z in obs))
        if other != value:
            raise AssertionError(f"monoid route {value} disagrees with observation route {other}")
    return value


# ---------------------------------------------------------------------------
# deterministic => thunkable


def det_implies_thunkable(T: Monad, kernels: Sequence[KleisliMorphism], seed: int | None = None) -> Record:
    """Observational monads: no deterministic, non-thunkable kernel.  Others: report such kernels."""
    det = 0
    witnesses = []
    for k in kernels:
        c = classify(k, strict=False)
        if c.deterministic:
            det += 1
            if not c.thunkable:
                witnesses.append(k.fmt())
    if T.observational:
        return record(
            f"{T.name}:deterministic-implies-thunkable",
            not witnesses,
            witnesses[0] if witnesses else None,
            seed,
            kernels=len(kernels),
            deterministic=det,
        )
    return record(
        f"{T.name}:deterministic-not-thunkable-exists",
        bool(witnesses),
        witnesses[0] if witnesses else None,
        seed,
        kernels=len(kernels),
        deterministic=det,
        counterexamples=len(witnesses),
        note="monad is not observational",
    )


# ---------------------------------------------------------------------------
# exchangeability


def permutation_failure(T: Monad, rho, X, n: int):
    obs = observe_n(T, rho, X, n)
    Xn = power_obj(T, X, n)
    for perm in itertools.permutations(range(n)):
        moved = T.fmap(lambda z: tuple(z[i] for i in perm), Xn, Xn, obs)
        if moved != obs:
            return perm
    return None


def marginal_failure(T: Monad, rho, X, n: int):
    if n == 0:
        return None
    obs = observe_n(T, rho, X, n)
    prev = observe_n(T, rho, X, n - 1)
    Xn, Xm = power_obj(T, X, n), power_obj(T, X, n - 1)
    for i in range(n):
        drop = (lambda i: (lambda z: () if n == 1 else tuple(c for j, c in enumerate(z) if j != i)))(i)
        if T.fmap(drop, Xn, Xm, obs) != prev:
            return i
    return None


def definetti_demo(T: Monad, rho, rho2, X, n_max: int = 4, name: str = "") -> list[Record]:
    """Exchangeability and marginal consistency of the observations, plus separation of two outers."""
    label = f"[{name}]" if name else ""
    out = []
    for which, r in (("first", rho), ("second", rho2)):
        perm_bad = next(((n, p) for n in range(n_max + 1) if (p := permutation_failure(T, r, X, n)) is not None), None)
        out.append(
            record(
                f"{T.name}:exchangeable-{which}{label}",
                perm_bad is None,
                None if perm_bad is None else f"n={perm_bad[0]} perm={perm_bad[1]}",
                None,
                n_max=n_max,
            )
        )
        marg_bad = next(((n, i) for n in range(1, n_max + 1) if (i := marginal_failure(T, r, X, n)) is not None), None)
        out.append(
            record(
                f"{T.name}:marginal-consistent-{which}{label}",
                marg_bad is None,
                None if marg_bad is None else f"n={marg_bad[0]} dropping coordinate {marg_bad[1]}",
                None,
                n_max=n_max,
            )
        )
    rep = distinguish(T, rho, rho2, X, n_max)
    same = rho == rho2
    out.append(
        record(
            f"{T.name}:separated{label}",
            rep.distinguished != same,
            None if rep.witness is None else {"observe_n": rep.n, "first": rep.witness[0], "second": rep.witness[1]},
            None,
            verdict=rep.fmt_verdict(),
        )
    )
    return out
