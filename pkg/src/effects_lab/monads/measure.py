"""Finitely supported measures with exact rational weights.

On a finite measurable space a measure is determined by its atom weights, so
a ``Measure`` is keyed by atoms (frozensets of points).  On a plain finite set
the keys are the points themselves, and one level up the keys are measures.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from ..core import MEAS, SET, FinSpace, StructureError, TooLarge, fmt_point, point_key
from .base import Monad, prod, product_key, sample_points


class Measure:
    """Immutable finitely supported measure; zero weights are dropped."""

    __slots__ = ("items", "_hash")

    def __init__(self, weights: Mapping | Iterable = ()):
        acc: dict = {}
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        for k, w in pairs:
            w = Fraction(w)
            if w < 0:
                raise StructureError(f"negative weight {w} at {fmt_point(k)}")
            acc[k] = acc.get(k, 0) + w
        self.items: tuple = tuple(sorted(((k, w) for k, w in acc.items() if w), key=lambda kw: point_key(kw[0])))
        self._hash = hash(self.items)

    def __eq__(self, other):
        return isinstance(other, Measure) and self._hash == other._hash and self.items == other.items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Measure({self.fmt()})"

    def __getitem__(self, key) -> Fraction:
        for k, w in self.items:
            if k == key:
                return w
        return Fraction(0)

    def __len__(self):
        return len(self.items)

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self.items)

    @property
    def total(self) -> Fraction:
        return sum((w for _, w in self.items), Fraction(0))

    def mass(self, pred: Callable) -> Fraction:
        return sum((w for k, w in self.items if pred(k)), Fraction(0))

    def scaled(self, c) -> "Measure":
        return Measure((k, w * c) for k, w in self.items)

    def sort_key(self):
        return tuple((point_key(k), w) for k, w in self.items)

    def fmt(self) -> str:
        def key(k):
            if isinstance(k, frozenset) and len(k) == 1:
                return fmt_point(next(iter(k)))
            return fmt_point(k)

        return "{" + ", ".join(f"{key(k)}: {w}" for k, w in self.items) + "}"


def _keys(X) -> tuple:
    if isinstance(X, FinSpace):
        return X.mkeys()
    raise TooLarge(f"{X!r} is not a finite space")


class MeasureMonad(Monad):
    """Probability (``normalized=True``) or subprobability measures."""

    finite = False

    def __init__(self, name: str, symbol: str, kind: str, normalized: bool):
        self.name = name
        self.symbol = symbol
        self.kind = kind
        self.normalized = normalized
        self.affine = normalized
        self.observational = True

    def _key_ok(self, X, k) -> bool:
        if isinstance(X, FinSpace):
            return k in set(X.mkeys())
        try:
            rep = X.mrep(k)
        except Exception:
            return False
        return X.contains(rep) and X.mkey(rep) == k

    def is_element(self, t, X) -> bool:
        if not isinstance(t, Measure):
            return False
        total = t.total
        if self.normalized and total != 1 or total > 1:
            return False
        return all(self._key_ok(X, k) for k in t.support)

    def eta(self, x, X) -> Measure:
        return Measure({X.mkey(x): 1})

    def mu(self, rho: Measure, X) -> Measure:
        acc: dict = {}
        for p, w in rho.items:
            for k, v in p.items:
                acc[k] = acc.get(k, 0) + w * v
        return Measure(acc)

    def fmap(self, f: Callable, X, Y, t: Measure) -> Measure:
        acc: dict = {}
        for k, w in t.items:
            k2 = Y.mkey(f(X.mrep(k)))
            acc[k2] = acc.get(k2, 0) + w
        return Measure(acc)

    def nabla_many(self, elems: Sequence, objs: Sequence) -> Measure:
        if not objs:
            return self.eta((), self.unit_object())
        P = prod(objs)
        acc: dict = {}
        for combo in itertools.product(*(e.items for e in elems)):
            key = product_key(P, [k for k, _ in combo])
            w = Fraction(1)
            for _, v in combo:
                w *= v
            acc[key] = acc.get(key, 0) + w
        return Measure(acc)

    def iter_elements(self, X, limit=None) -> Iterator:
        raise TooLarge(f"{self.symbol}X is infinite")

    def _random_weights(self, k: int, rng: random.Random) -> list[Fraction]:
        raw = [rng.randint(1, 4) for _ in range(k)]
        s = sum(raw)
        ws = [Fraction(r, s) for r in raw]
        if not self.normalized:
            c = rng.choice([Fraction(1), Fraction(1), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)])
            ws = [w * c for w in ws]
        return ws

    def random_element(self, X, rng: random.Random) -> Measure:
        if not self.normalized and rng.randrange(12) == 0:
            return Measure()
        k = rng.choice((1, 1, 2, 2, 3))
        if isinstance(X, FinSpace):
            keys = list(X.mkeys())
            if not keys:
                return Measure()
            chosen = rng.sample(keys, min(k, len(keys)))
        else:
            chosen = list(dict.fromkeys(X.mkey(X.random_point(rng)) for _ in range(k)))
        return Measure(zip(chosen, self._random_weights(len(chosen), rng)))

    def seed_elements(self, X) -> list:
        if isinstance(X, FinSpace):
            keys = list(X.mkeys())
        else:
            keys = [X.mkey(p) for p in sample_points(X, 4)[0]]
        out = [Measure({k: 1}) for k in keys]
        if len(keys) >= 2:
            out.append(Measure({keys[0]: Fraction(1, 2), keys[1]: Fraction(1, 2)}))
            out.append(Measure({k: Fraction(1, len(keys)) for k in keys}))
        if not self.normalized:
            out.append(Measure())
            if keys:
                out.append(Measure({keys[0]: Fraction(1, 2)}))
        return out

    def fmt(self, t) -> str:
        return t.fmt() if isinstance(t, Measure) else fmt_point(t)

    def measure_of(self, t: Measure, X: FinSpace, subset: Iterable) -> Fraction:
        """Mass of a measurable subset of a finite space."""
        s = frozenset(subset)
        if X.kind == MEAS:
            if not X.is_measurable(s):
                raise StructureError(f"{fmt_point(s)} is not measurable")
            return t.mass(lambda a: a <= s)
        return t.mass(lambda x: x in s)


giry = MeasureMonad("giry", "P", MEAS, normalized=True)
subgiry = MeasureMonad("subgiry", "M", MEAS, normalized=False)
dist = MeasureMonad("dist", "Dist", SET, normalized=True)
