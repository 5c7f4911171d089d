"""The lower Vietoris monad on finite topological spaces.

An element of HX is a closed subset of X.  Finite spaces are Alexandrov, so
closed sets are down-sets of the specialization order, HX is ordered by
inclusion and the closure of a collection of closed sets is its down-closure.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from ..core import TOP, FinSpace, TooLarge, _iter_downsets, sort_points
from .base import Monad, prod, sample_points


def _downsets_of(points, X) -> Iterator[frozenset]:
    return _iter_downsets(sort_points(points), {p: X.down(p) for p in points})


@lru_cache(maxsize=65536)
def _closed_subsets(C: frozenset, X) -> frozenset:
    return frozenset(_downsets_of(C, X))


class Hoare(Monad):
    name = "hoare"
    symbol = "H"
    kind = TOP
    affine = False
    observational = True

    def is_element(self, t, X) -> bool:
        if not isinstance(t, frozenset):
            return False
        return all(X.contains(c) for c in t) and all(X.down(c) <= t for c in t)

    def eta(self, x, X) -> frozenset:
        return X.down(x)

    def mu(self, rho: frozenset, X) -> frozenset:
        # a finite union of closed sets is already closed
        return frozenset().union(*rho)

    def fmap(self, f: Callable, X, Y, t: frozenset) -> frozenset:
        return Y.closure({f(c) for c in t})

    def bind(self, t: frozenset, h: Callable, X, Y) -> frozenset:
        # the union of the closed sets h(c) is closed, so no closure in HY is needed
        return frozenset().union(*(h(c) for c in t))

    def nabla_many(self, elems: Sequence, objs: Sequence) -> frozenset:
        # products of down-sets are down-sets of the product order
        return frozenset(itertools.product(*elems))

    def leq(self, x, y, X) -> bool:
        return x <= y

    def down(self, x: frozenset, X) -> frozenset:
        return _closed_subsets(x, X)

    def iter_elements(self, X, limit=None) -> Iterator:
        pts = list(X.iter_points(limit))
        out = []
        for i, c in enumerate(_downsets_of(pts, X)):
            if limit is not None and i >= limit:
                raise TooLarge(f"H{X!r} has more than {limit} points")
            out.append(c)
        return iter(sort_points(out))

    def random_element(self, X, rng: random.Random) -> frozenset:
        k = rng.choice((0, 1, 1, 2, 2, 3))
        return X.closure({X.random_point(rng) for _ in range(k)})

    def seed_elements(self, X) -> list:
        pts, _ = sample_points(X, 3)
        return [frozenset()] + [X.down(p) for p in pts]


hoare = Hoare()


def lower_vietoris_space(X: FinSpace) -> FinSpace:
    """HX as a finite topological space: closed sets of X ordered by inclusion."""
    pts = tuple(hoare.iter_elements(X))
    down = {C: frozenset(D for D in pts if D <= C) for C in pts}
    return FinSpace(pts, TOP, down=down, name=f"H{X.name or ''}")
