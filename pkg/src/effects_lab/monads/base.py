"""Shared machinery for monad instances.

Every object a monad is applied to follows one small protocol: ``kind``,
``finite``, ``contains``, ``iter_points``, ``random_point`` and, depending on
the kind, ``mkey``/``mrep`` (measurable pieces) or ``leq``/``down``/``closure``
(specialization order).  ``FinSpace`` implements it directly; ``TObj`` and
``ProdObj`` implement it lazily so that levels such as ``TTX`` never need to
be materialized.
"""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

from ..core import (
    MEAS,
    SET,
    TOP,
    FinSpace,
    StructureError,
    TooLarge,
    fmt_point,
    point_key,
    product_many,
    sort_points,
    unit_space,
)

POINT_CAP = 20000


class TObj:
    """The object ``T(inner)`` for a monad ``T``; its points are ``T``-elements."""

    def __init__(self, monad: "Monad", inner):
        self.monad = monad
        self.inner = inner
        self.kind = inner.kind
        self._hash = hash(("T", monad.name, inner))

    def __eq__(self, other):
        return isinstance(other, TObj) and self.monad.name == other.monad.name and self.inner == other.inner

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<{self.name}>"

    def sort_key(self):
        return (self.monad.name, point_key(self.inner))

    @property
    def name(self) -> str:
        return f"{self.monad.symbol}{_obj_name(self.inner)}"

    @property
    def finite(self) -> bool:
        return self.monad.finite and self.inner.finite

    def contains(self, x) -> bool:
        return self.monad.is_element(x, self.inner)

    def iter_points(self, limit: int | None = None) -> Iterator:
        if not self.finite:
            raise TooLarge(f"{self.name} is infinite")
        return self.monad.iter_elements(self.inner, limit)

    @cached_property
    def points(self) -> tuple:
        return tuple(self.iter_points(POINT_CAP))

    def random_point(self, rng: random.Random):
        return self.monad.random_element(self.inner, rng)

    # elements of TX are themselves canonical, so every singleton is a piece
    def mkey(self, x):
        return x

    def mrep(self, key):
        return key

    def leq(self, x, y) -> bool:
        return self.monad.leq(x, y, self.inner)

    def down(self, x) -> frozenset:
        return self.monad.down(x, self.inner)

    def closure(self, s) -> frozenset:
        out: set = set()
        for x in s:
            out |= self.down(x)
        return frozenset(out)


class ProdObj:
    """Finite product where some factor is a lazily enumerated object."""

    def __init__(self, factors: Sequence):
        self.factors = tuple(factors)
        kinds = {f.kind for f in self.factors}
        if len(kinds) > 1:
            raise StructureError(f"cannot take a product of mixed kinds {sorted(kinds)}")
        self.kind = kinds.pop() if kinds else SET
        self._hash = hash(("P",) + self.factors)

    def __eq__(self, other):
        return isinstance(other, ProdObj) and self.factors == other.factors

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<{self.name}>"

    def sort_key(self):
        return tuple(point_key(f) for f in self.factors)

    @property
    def name(self) -> str:
        return "*".join(_obj_name(f) for f in self.factors)

    @property
    def finite(self) -> bool:
        return all(f.finite for f in self.factors)

    def contains(self, x) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == len(self.factors)
            and all(f.contains(c) for f, c in zip(self.factors, x))
        )

    def iter_points(self, limit: int | None = None) -> Iterator:
        lists = [list(f.iter_points(limit)) for f in self.factors]
        size = 1
        for l in lists:
            size *= len(l)
        if limit is not None and size > limit:
            raise TooLarge(f"{self.name} has more than {limit} points")
        return (tuple(p) for p in itertools.product(*lists))

    @cached_property
    def points(self) -> tuple:
        return tuple(self.iter_points(POINT_CAP))

    def random_point(self, rng):
        return tuple(f.random_point(rng) for f in self.factors)

    def mkey(self, x):
        return tuple(f.mkey(c) for f, c in zip(self.factors, x))

    def mrep(self, key):
        return tuple(f.mrep(k) for f, k in zip(self.factors, key))

    def leq(self, x, y) -> bool:
        return all(f.leq(a, b) for f, a, b in zip(self.factors, x, y))

    def down(self, x) -> frozenset:
        return frozenset(itertools.product(*(f.down(c) for f, c in zip(self.factors, x))))

    def closure(self, s) -> frozenset:
        out: set = set()
        for x in s:
            out |= self.down(x)
        return frozenset(out)


def _obj_name(obj) -> str:
    name = getattr(obj, "name", None)
    if name:
        return name if isinstance(obj, FinSpace) or "*" not in name else f"({name})"
    return f"[{','.join(fmt_point(p) for p in obj.points)}]" if isinstance(obj, FinSpace) else "?"


def prod(objs: Sequence):
    objs = tuple(objs)
    if all(isinstance(o, FinSpace) for o in objs):
        return product_many(objs)
    return ProdObj(objs)


def product_key(P, keys: Sequence):
    """Measurable-piece key of a product of pieces, in the representation ``P.mkey`` uses."""
    if isinstance(P, FinSpace) and P.kind == MEAS:
        return frozenset(itertools.product(*keys))
    return tuple(keys)


def is_morphism(dom, cod, fn: Callable, points: Iterable | None = None) -> bool:
    """Whether ``fn`` is structure preserving on the (given or all) points of ``dom``."""
    if cod.kind == SET:
        return True
    if cod.kind == MEAS:
        if isinstance(dom, FinSpace):
            return all(len({cod.mkey(fn(x)) for x in a}) == 1 for a in dom.atoms)
        return True
    pts = list(dom.iter_points(POINT_CAP) if points is None else points)
    return all(cod.leq(fn(y), fn(x)) for x in pts for y in dom.down(x) if points is None or y in pts)


class Monad(ABC):
    """A commutative monad on one base category, given by element-level maps.

    ``fmap`` takes a plain callable on points; ``nabla_many`` is the n-ary
    monoidal map ``TX1 x ... x TXn -> T(X1 x ... x Xn)``.
    """

    name: str = "?"
    symbol: str = "T"
    kind: str = SET
    affine: bool = False
    observational: bool = True
    finite: bool = True

    def __repr__(self):
        return f"<monad {self.name}>"

    def sort_key(self):
        return (self.name,)

    def T(self, X) -> TObj:
        return TObj(self, X)

    def accepts(self, X) -> bool:
        return X.kind == self.kind

    @abstractmethod
    def eta(self, x, X): ...

    @abstractmethod
    def mu(self, rho, X): ...

    @abstractmethod
    def fmap(self, f: Callable, X, Y, t): ...

    @abstractmethod
    def nabla_many(self, elems: Sequence, objs: Sequence): ...

    @abstractmethod
    def is_element(self, t, X) -> bool: ...

    @abstractmethod
    def iter_elements(self, X, limit: int | None = None) -> Iterator: ...

    @abstractmethod
    def random_element(self, X, rng: random.Random): ...

    def seed_elements(self, X) -> list:
        """Deterministic, structurally interesting elements used before random ones."""
        return []

    def bind(self, t, h: Callable, X, Y):
        """``mu . T(h)`` applied to ``t``: run ``t`` then continue with ``h``."""
        return self.mu(self.fmap(h, X, self.T(Y), t), Y)

    def nabla(self, p, q, X, Y):
        return self.nabla_many((p, q), (X, Y))

    def leq(self, x, y, X) -> bool:
        raise StructureError(f"{self.name}: {self.symbol}X carries no order")

    def down(self, x, X) -> frozenset:
        raise StructureError(f"{self.name}: {self.symbol}X carries no order")

    def fmt(self, t) -> str:
        return fmt_point(t)

    def unit_object(self) -> FinSpace:
        return unit_space(self.kind)

    def elements(self, X, budget: int, rng: random.Random | None = None) -> tuple[list, bool]:
        """Up to ``budget`` elements of ``TX``; the flag says whether this is all of them."""
        try:
            return list(self.iter_elements(X, budget)), True
        except TooLarge:
            pass
        rng = rng or random.Random(0)
        seen = dict.fromkeys(self.seed_elements(X))
        attempts = 0
        while len(seen) < budget and attempts < 4 * budget:
            seen.setdefault(self.random_element(X, rng))
            attempts += 1
        return sort_points(list(seen)[:budget]), False


def sample_points(obj, budget: int, rng: random.Random | None = None) -> tuple[list, bool]:
    """Up to ``budget`` points of any object, exhaustively when it is small enough."""
    if isinstance(obj, TObj):
        return obj.monad.elements(obj.inner, budget, rng)
    try:
        return list(obj.iter_points(budget)), True
    except TooLarge:
        pass
    rng = rng or random.Random(0)
    seen: dict = {}
    attempts = 0
    while len(seen) < budget and attempts < 4 * budget:
        seen.setdefault(obj.random_point(rng))
        attempts += 1
    return sort_points(seen), False


class KleisliMorphism:
    """A morphism ``dom ~> cod``: each point of ``dom`` goes to an element of ``T cod``."""

    def __init__(self, monad: Monad, dom, cod, fn, name: str | None = None):
        self.monad = monad
        self.dom = dom
        self.cod = cod
        if isinstance(fn, dict):
            table = dict(fn)
            self._fn = table.__getitem__
            self._table = table
        else:
            self._fn = fn
            self._table = None
        self.name = name

    def __call__(self, x):
        return self._fn(x)

    sharp = __call__

    @property
    def table(self) -> dict:
        if self._table is None:
            self._table = {x: self._fn(x) for x in self.dom.iter_points(POINT_CAP)}
        return self._table

    def agree_on(self, other: "KleisliMorphism", points: Iterable):
        """First point where the two morphisms differ, or ``None``."""
        for x in points:
            if self(x) != other(x):
                return x
        return None

    def __eq__(self, other):
        if not isinstance(other, KleisliMorphism):
            return NotImplemented
        if self.dom != other.dom or self.cod != other.cod or self.monad.name != other.monad.name:
            return False
        return self.table == other.table

    def __hash__(self):
        return hash((self.monad.name, self.dom, self.cod, tuple(self.table.items())))

    def __repr__(self):
        return f"<kleisli {self.name or ''} {_obj_name(self.dom)} ~> {_obj_name(self.cod)} @ {self.monad.name}>"

    def validate(self) -> None:
        TY = self.monad.T(self.cod)
        for x, t in self.table.items():
            if not TY.contains(t):
                raise StructureError(f"{fmt_point(x)} maps to {self.monad.fmt(t)}, not an element of {TY.name}")
        if not is_morphism(self.dom, TY, self._fn):
            raise StructureError(f"{self.name or 'kernel'} is not structure preserving as a map into {TY.name}")

    def fmt(self) -> str:
        return "{" + "; ".join(f"{fmt_point(x)} -> {self.monad.fmt(t)}" for x, t in self.table.items()) + "}"


def kleisli_compose(h: KleisliMorphism, k: KleisliMorphism) -> KleisliMorphism:
    """``h`` after ``k``: flatten the pushforward of ``k(x)`` along ``h``."""
    if k.cod != h.dom or k.monad.name != h.monad.name:
        raise StructureError("kleisli_compose: codomain/domain or monad mismatch")
    T = k.monad
    TZ = T.T(h.cod)

    memo: dict = {}

    def fn(x):
        if x not in memo:
            memo[x] = T.bind(k(x), h, k.cod, h.cod)
        return memo[x]

    return KleisliMorphism(T, k.dom, h.cod, fn)


def pure(monad: Monad, dom, cod, g: Callable, name: str | None = None) -> KleisliMorphism:
    return KleisliMorphism(monad, dom, cod, lambda x: monad.eta(g(x), cod), name=name)


def eta_morphism(monad: Monad, X) -> KleisliMorphism:
    return KleisliMorphism(monad, X, X, lambda x: monad.eta(x, X), name=f"eta_{_obj_name(X)}")
