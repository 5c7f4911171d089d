"""The maybe monad and read-only state over a two-element environment."""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterator, Sequence

from ..core import SET, TooLarge, fmt_point, point_key
from .base import Monad


class Just:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __eq__(self, other):
        return isinstance(other, Just) and self.value == other.value

    def __hash__(self):
        return hash(("just", self.value))

    def __repr__(self):
        return f"Just({self.value!r})"

    def sort_key(self):
        return (1, point_key(self.value))

    def fmt(self):
        return f"just({fmt_point(self.value)})"


class _Nothing:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOTHING"

    def __reduce__(self):
        return (_Nothing, ())

    def sort_key(self):
        return (0,)

    def fmt(self):
        return "Nothing"


NOTHING = _Nothing()


class Maybe(Monad):
    name = "maybe"
    symbol = "Maybe"
    kind = SET
    affine = False
    observational = True

    def is_element(self, t, X) -> bool:
        return t is NOTHING or isinstance(t, Just) and X.contains(t.value)

    def eta(self, x, X):
        return Just(x)

    def mu(self, rho, X):
        return NOTHING if rho is NOTHING else rho.value

    def fmap(self, f: Callable, X, Y, t):
        return NOTHING if t is NOTHING else Just(f(t.value))

    def nabla_many(self, elems: Sequence, objs: Sequence):
        # failure on either side absorbs the pair
        if any(e is NOTHING for e in elems):
            return NOTHING
        return Just(tuple(e.value for e in elems))

    def iter_elements(self, X, limit=None) -> Iterator:
        pts = list(X.iter_points(None if limit is None else limit - 1))
        return iter([NOTHING] + [Just(x) for x in pts])

    def random_element(self, X, rng: random.Random):
        if rng.randrange(4) == 0:
            return NOTHING
        return Just(X.random_point(rng))

    def seed_elements(self, X) -> list:
        return [NOTHING]


class ReaderVal:
    """The value produced under environment 0 and under environment 1."""

    __slots__ = ("at0", "at1")

    def __init__(self, at0, at1):
        self.at0 = at0
        self.at1 = at1

    def __eq__(self, other):
        return isinstance(other, ReaderVal) and self.at0 == other.at0 and self.at1 == other.at1

    def __hash__(self):
        return hash(("reader", self.at0, self.at1))

    def __repr__(self):
        return f"ReaderVal({self.at0!r}, {self.at1!r})"

    def at(self, env: int):
        return self.at1 if env else self.at0

    def sort_key(self):
        return (point_key(self.at0), point_key(self.at1))

    def fmt(self):
        return f"<{fmt_point(self.at0)}|{fmt_point(self.at1)}>"


class Reader(Monad):
    name = "reader"
    symbol = "R"
    kind = SET
    affine = True
    observational = False

    def is_element(self, t, X) -> bool:
        return isinstance(t, ReaderVal) and X.contains(t.at0) and X.contains(t.at1)

    def eta(self, x, X):
        return ReaderVal(x, x)

    def mu(self, rho, X):
        # run the inner computation under the same environment
        return ReaderVal(rho.at0.at0, rho.at1.at1)

    def fmap(self, f: Callable, X, Y, t):
        return ReaderVal(f(t.at0), f(t.at1))

    def nabla_many(self, elems: Sequence, objs: Sequence):
        return ReaderVal(tuple(e.at0 for e in elems), tuple(e.at1 for e in elems))

    def iter_elements(self, X, limit=None) -> Iterator:
        pts = list(X.iter_points(limit))
        if limit is not None and len(pts) ** 2 > limit:
            raise TooLarge(f"R{X!r} has more than {limit} points")
        return (ReaderVal(a, b) for a, b in itertools.product(pts, repeat=2))

    def random_element(self, X, rng: random.Random):
        return ReaderVal(X.random_point(rng), X.random_point(rng))


maybe = Maybe()
reader = Reader()
