"""Monad, functor and monoidal-structure law checking.

Each law is checked on every case when the number of cases fits the budget
and on a seeded sample otherwise; the record says which happened.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, Sequence

from ..core import FinSpace, all_maps, fmt_point, unit_space
from ..report import Record, record
from .base import Monad, TooLarge, prod, sample_points


def cases(lists: Sequence[Sequence], budget: int, rng: random.Random) -> tuple[list[tuple], bool]:
    """The product of ``lists``, or ``budget`` seeded draws from it."""
    size = 1
    for l in lists:
        size *= len(l)
    if size == 0:
        return [], True
    if size <= budget:
        return list(itertools.product(*lists)), True
    seen: dict = {}
    for _ in range(4 * budget):
        seen.setdefault(tuple(l[rng.randrange(len(l))] for l in lists))
        if len(seen) >= budget:
            break
    return list(seen), False


def small_maps(X, Y, budget: int, rng: random.Random) -> tuple[list[Callable], bool]:
    """Structure-preserving maps ``X -> Y`` as callables (all of them when few)."""
    if isinstance(X, FinSpace) and isinstance(Y, FinSpace):
        n = len(Y.points) ** len(X.points)
        if n <= 20 * budget:
            maps = [m.table.__getitem__ for m in all_maps(X, Y)]
            if len(maps) <= budget:
                return maps, True
            idx = sorted(rng.sample(range(len(maps)), budget))
            return [maps[i] for i in idx], False
    # constants and the identity are always structure preserving
    pts, _ = sample_points(Y, budget, rng)
    maps: list[Callable] = [(lambda y: (lambda _x: y))(y) for y in pts[: budget - 1]]
    if X == Y:
        maps.insert(0, lambda x: x)
    return maps[:budget], False


def _first_failure(items, test: Callable):
    for it in items:
        if not test(*it):
            return it
    return None


def _fmt_case(T: Monad, case) -> str:
    parts = []
    for c in case:
        if callable(c) and not hasattr(c, "fmt"):
            parts.append("<map>")
        else:
            parts.append(T.fmt(c) if not isinstance(c, str) else c)
    return ", ".join(parts)


class LawChecker:
    """Runs every law for one monad on one object."""

    def __init__(self, T: Monad, X, budget: int = 300, seed: int = 0):
        self.T = T
        self.X = X
        self.budget = budget
        self.seed = seed
        self.rng = random.Random(f"{seed}:{T.name}:{getattr(X, 'name', '')}:{len(getattr(X, 'points', ()))}")
        self.records: list[Record] = []

    def _check(self, law: str, items_exh: tuple[list, bool], test: Callable) -> None:
        items, exhaustive = items_exh
        bad = _first_failure(items, test)
        name = getattr(self.X, "name", None) or "X"
        self.records.append(
            record(
                f"{self.T.name}:{law}[{name}]",
                bad is None,
                None if bad is None else _fmt_case(self.T, bad),
                self.seed,
                cases=len(items),
                exhaustive=exhaustive,
            )
        )

    def run(self) -> list[Record]:
        T, X, b, rng = self.T, self.X, self.budget, self.rng
        TX, TTX = T.T(X), T.T(T.T(X))
        xs, xs_ex = sample_points(X, b, rng)
        ts, ts_ex = T.elements(X, b, rng)
        rs, rs_ex = T.elements(TX, b, rng)
        ss, ss_ex = T.elements(TTX, max(20, b // 3), rng)
        mu_X = lambda r: T.mu(r, X)
        eta_X = lambda x: T.eta(x, X)

        self._check("left-unit", ([(t,) for t in ts], ts_ex), lambda t: T.mu(T.eta(t, TX), X) == t)
        self._check("right-unit", ([(t,) for t in ts], ts_ex), lambda t: T.mu(T.fmap(eta_X, X, TX, t), X) == t)
        self._check(
            "associativity",
            ([(s,) for s in ss], ss_ex),
            lambda s: T.mu(T.mu(s, TX), X) == T.mu(T.fmap(mu_X, TTX, TX, s), X),
        )

        Y = X
        fs, fs_ex = small_maps(X, Y, max(4, b // 10), rng)
        TY = T.T(Y)

        def Tf(f):
            return lambda t: T.fmap(f, X, Y, t)

        self._check(
            "eta-naturality",
            self._cases([xs, fs], xs_ex and fs_ex),
            lambda x, f: T.fmap(f, X, Y, T.eta(x, X)) == T.eta(f(x), Y),
        )
        self._check(
            "mu-naturality",
            self._cases([rs, fs], rs_ex and fs_ex),
            lambda r, f: T.fmap(f, X, Y, T.mu(r, X)) == T.mu(T.fmap(Tf(f), TX, TY, r), Y),
        )
        self._check("fmap-identity", ([(t,) for t in ts], ts_ex), lambda t: T.fmap(lambda x: x, X, X, t) == t)
        self._check(
            "fmap-composition",
            self._cases([ts, fs, fs], ts_ex and fs_ex),
            lambda t, f, g: T.fmap(lambda x: g(f(x)), X, X, t) == T.fmap(g, X, X, T.fmap(f, X, X, t)),
        )
        self._monoidal(xs, xs_ex, ts, ts_ex, rs, rs_ex, fs, fs_ex)
        self._affine()
        return self.records

    def _cases(self, lists, exhaustive_inputs: bool) -> tuple[list, bool]:
        items, ex = cases(lists, self.budget, self.rng)
        return items, ex and exhaustive_inputs

    def _monoidal(self, xs, xs_ex, ts, ts_ex, rs, rs_ex, fs, fs_ex) -> None:
        T, X = self.T, self.X
        XX = prod((X, X))
        TX = T.T(X)
        one = T.unit_object()
        unit = T.eta((), one)
        swap = lambda p: (p[1], p[0])
        nab = lambda p, q: T.nabla(p, q, X, X)

        self._check(
            "nabla-unit-compat",
            self._cases([xs, xs], xs_ex),
            lambda x, y: nab(T.eta(x, X), T.eta(y, X)) == T.eta((x, y), XX),
        )
        self._check(
            "nabla-symmetry",
            self._cases([ts, ts], ts_ex),
            lambda p, q: T.fmap(swap, XX, XX, nab(p, q)) == nab(q, p),
        )
        X1, X1r = prod((X, one)), prod((one, X))
        self._check(
            "nabla-unit",
            ([(t,) for t in ts], ts_ex),
            lambda p: T.fmap(lambda z: z[0], X1, X, T.nabla(p, unit, X, one)) == p
            and T.fmap(lambda z: z[1], X1r, X, T.nabla(unit, p, one, X)) == p,
        )
        L, R = prod((XX, X)), prod((X, XX))
        self._check(
            "nabla-associativity",
            self._cases([ts, ts, ts], ts_ex),
            lambda p, q, r: T.fmap(lambda z: (z[0][0], (z[0][1], z[1])), L, R, T.nabla(nab(p, q), r, XX, X))
            == T.nabla(p, nab(q, r), X, XX),
        )
        self._check(
            "nabla-naturality",
            self._cases([ts, ts, fs, fs], ts_ex and fs_ex),
            lambda p, q, f, g: nab(T.fmap(f, X, X, p), T.fmap(g, X, X, q))
            == T.fmap(lambda z: (f(z[0]), g(z[1])), XX, XX, nab(p, q)),
        )
        TXTX = prod((TX, TX))
        TXX = T.T(XX)
        self._check(
            "nabla-mu-compat",
            self._cases([rs, rs], rs_ex),
            lambda R_, S_: nab(T.mu(R_, X), T.mu(S_, X))
            == T.mu(T.fmap(lambda z: nab(z[0], z[1]), TXTX, TXX, T.nabla(R_, S_, TX, TX)), XX),
        )

        def commutes(p, q):
            left = T.mu(T.fmap(lambda a: nab(T.eta(a, X), q), X, TXX, p), XX)
            right = T.mu(T.fmap(lambda b: nab(p, T.eta(b, X)), X, TXX, q), XX)
            return left == right == nab(p, q)

        self._check("commutativity", self._cases([ts, ts], ts_ex), commutes)

    def _affine(self) -> None:
        T = self.T
        one = T.unit_object()
        elems, exhaustive = T.elements(one, 50, self.rng)
        unit = T.eta((), one)
        others = [e for e in elems if e != unit]
        holds = not others
        self.records.append(
            record(
                f"{T.name}:affine-matches-claim",
                holds == T.affine,
                None if holds else T.fmt(others[0]),
                self.seed,
                claimed=T.affine,
                observed=holds,
                exhaustive=exhaustive,
            )
        )


def law_suite(T: Monad, spaces: Sequence, budget: int = 300, seed: int = 0) -> list[Record]:
    """All monad and monoidal laws of ``T`` on each space (converted to ``T``'s kind when possible)."""
    out: list[Record] = []
    done = False
    for X in spaces:
        if not T.accepts(X):
            continue
        recs = LawChecker(T, X, budget, seed).run()
        if done:
            recs = [r for r in recs if "affine" not in r.check]
        done = True
        out.extend(recs)
    return out


def kleisli_laws(T: Monad, spaces: Sequence, budget: int = 200, seed: int = 0) -> list[Record]:
    """Kleisli composition is unital and associative on random small morphisms."""
    from .base import KleisliMorphism, eta_morphism, kleisli_compose
    from ..kleisli import random_kernel

    out = []
    rng = random.Random(seed)
    for X in spaces:
        if not T.accepts(X) or not X.finite:
            continue
        ks = [random_kernel(T, X, X, rng) for _ in range(max(3, budget // 40))]
        eta = eta_morphism(T, X)
        unit_ok = all(kleisli_compose(k, eta) == k and kleisli_compose(eta, k) == k for k in ks)
        assoc_bad = None
        for f, g, h in itertools.islice(itertools.product(ks, repeat=3), budget):
            if kleisli_compose(h, kleisli_compose(g, f)) != kleisli_compose(kleisli_compose(h, g), f):
                assoc_bad = (f, g, h)
                break
        name = X.name or "X"
        out.append(record(f"{T.name}:kleisli-unit[{name}]", unit_ok, None, seed, kernels=len(ks)))
        out.append(
            record(
                f"{T.name}:kleisli-associativity[{name}]",
                assoc_bad is None,
                None if assoc_bad is None else "; ".join(k.fmt() for k in assoc_bad),
                seed,
            )
        )
    return out
