"""Exact finite base categories.

Three kinds of finite object live here: plain sets, finite measurable
spaces and finite topological spaces.  A finite sigma-algebra is stored
through its atoms (the partition it induces) and a finite topology through
its specialization preorder; the explicit families of measurable or open
sets are derived on demand.  All weights elsewhere in the package are
``fractions.Fraction`` values, so every equality is exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Rational = Fraction

SET = "set"
MEAS = "meas"
TOP = "top"
KINDS = (SET, MEAS, TOP)


class StructureError(ValueError):
    """A family, map or space violates the axioms of its kind."""


class TooLarge(RuntimeError):
    """An enumeration would exceed its configured limit."""


# ---------------------------------------------------------------------------
# canonical ordering and printing of points


@lru_cache(maxsize=None)
def point_key(x: Hashable) -> tuple:
    """Total, deterministic sort key for any point label used in the package."""
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, bool):
        return (4, int(x))
    if isinstance(x, (int, Fraction)):
        return (4, x)
    if isinstance(x, tuple):
        return (1, len(x), tuple(point_key(e) for e in x))
    if isinstance(x, frozenset):
        return (2, len(x), tuple(sorted(point_key(e) for e in x)))
    sk = getattr(x, "sort_key", None)
    if sk is not None:
        return (3, type(x).__name__, sk())
    raise TypeError(f"unsupported point label {x!r}")


def sort_points(xs: Iterable[Hashable]) -> tuple:
    return tuple(sorted(set(xs), key=point_key))


def fmt_point(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "(" + ",".join(fmt_point(e) for e in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(fmt_point(e) for e in sort_points(x)) + "}"
    f = getattr(x, "fmt", None)
    if f is not None:
        return f()
    return str(x)


def fmt_family(family: Iterable[frozenset]) -> str:
    return "{" + ", ".join(fmt_point(s) for s in sort_points(family)) + "}"


# ---------------------------------------------------------------------------
# structure helpers on raw carriers


def _atoms_from_generators(points: Sequence, generators: Iterable[Iterable]) -> tuple[frozenset, ...]:
    gens = [frozenset(g) for g in generators]
    sig: dict[tuple, list] = {}
    for p in points:
        sig.setdefault(tuple(p in g for g in gens), []).append(p)
    return tuple(sorted((frozenset(c) for c in sig.values()), key=point_key))


def _down_from_generators(points: Sequence, generators: Iterable[Iterable]) -> dict:
    gens = [frozenset(g) for g in generators]
    # y <= x  iff every generator containing y also contains x
    return {
        x: frozenset(y for y in points if all(x in g for g in gens if y in g))
        for x in points
    }


def _iter_downsets(points: Sequence, down: Mapping) -> Iterator[frozenset]:
    """All down-closed subsets of a finite preorder, in a deterministic order."""
    order = {p: i for i, p in enumerate(points)}
    up = {p: frozenset(q for q in points if p in down[q]) for p in points}

    def rec(remaining: frozenset, acc: frozenset) -> Iterator[frozenset]:
        if not remaining:
            yield acc
            return
        p = min(
            (q for q in remaining if not ((down[q] & remaining) - up[q])),
            key=order.__getitem__,
        )
        cls = down[p] & up[p] & remaining
        yield from rec(remaining - up[p], acc)
        yield from rec(remaining - cls, acc | cls)

    yield from rec(frozenset(points), frozenset())


def _check_family(points: Sequence, family: set[frozenset], kind: str) -> None:
    carrier = frozenset(points)
    if frozenset() not in family or carrier not in family:
        raise StructureError(f"{kind} family must contain the empty set and the carrier")
    for s in family:
        if not s <= carrier:
            raise StructureError(f"{fmt_point(s)} is not a subset of the carrier")
    for a, b in itertools.combinations(family, 2):
        if a | b not in family:
            raise StructureError(f"{kind} family not closed under union: {fmt_point(a)}, {fmt_point(b)}")
        if kind == TOP and a & b not in family:
            raise StructureError(f"topology not closed under intersection: {fmt_point(a)}, {fmt_point(b)}")
    if kind == MEAS:
        for a in family:
            if carrier - a not in family:
                raise StructureError(f"algebra not closed under complement: {fmt_point(a)}")


def complete_structure(carrier: Iterable, generators: Iterable[Iterable], kind: str) -> frozenset:
    """Smallest algebra (``kind='meas'``) or topology (``kind='top'``) containing ``generators``."""
    points = sort_points(carrier)
    gens = [frozenset(g) for g in generators]
    for g in gens:
        if not g <= set(points):
            raise StructureError(f"generator {fmt_point(g)} is not a subset of the carrier")
    if kind == MEAS:
        return FinSpace(points, MEAS, atoms=_atoms_from_generators(points, gens)).measurable_sets
    if kind == TOP:
        return FinSpace(points, TOP, down=_down_from_generators(points, gens)).opens
    raise StructureError(f"cannot complete a structure of kind {kind!r}")


# ---------------------------------------------------------------------------
# spaces


class FinSpace:
    """A finite set, measurable space or topological space.

    Points are arbitrary hashable labels kept in canonical order.  Two spaces
    are equal when they have the same kind, carrier and structure; the
    optional ``name`` is cosmetic.
    """

    __slots__ = ("points", "kind", "name", "_atoms", "_down", "_hash", "__dict__")

    def __init__(self, points: Iterable, kind: str = SET, *, atoms=None, down=None, name: str | None = None):
        if kind not in KINDS:
            raise StructureError(f"unknown kind {kind!r}")
        pts = sort_points(points)
        self.points: tuple = pts
        self.kind = kind
        self.name = name
        self._atoms = None
        self._down = None
        carrier = frozenset(pts)
        if kind == MEAS:
            if atoms is None:
                atoms = [frozenset([p]) for p in pts]
            atoms = tuple(sorted((frozenset(a) for a in atoms), key=point_key))
            seen: set = set()
            for a in atoms:
                if not a or a & seen or not a <= carrier:
                    raise StructureError("atoms must be nonempty, disjoint subsets of the carrier")
                seen |= a
            if seen != carrier:
                raise StructureError("atoms must cover the carrier")
            self._atoms = atoms
        elif kind == TOP:
            if down is None:
                down = {p: frozenset([p]) for p in pts}
            down = {p: frozenset(down[p]) for p in pts}
            for p in pts:
                if p not in down[p] or not down[p] <= carrier:
                    raise StructureError("specialization preorder must be reflexive")
                for q in down[p]:
                    if not down[q] <= down[p]:
                        raise StructureError("specialization preorder must be transitive")
            self._down = down
        self._hash = hash((kind, pts, self._atoms, None if self._down is None else tuple(self._down[p] for p in pts)))

    # constructors ---------------------------------------------------------

    @classmethod
    def plain(cls, points, name=None) -> "FinSpace":
        return cls(points, SET, name=name)

    @classmethod
    def measurable(cls, points, generators=(), name=None) -> "FinSpace":
        pts = sort_points(points)
        return cls(pts, MEAS, atoms=_atoms_from_generators(pts, generators), name=name)

    @classmethod
    def topological(cls, points, generators=(), name=None) -> "FinSpace":
        pts = sort_points(points)
        return cls(pts, TOP, down=_down_from_generators(pts, generators), name=name)

    @classmethod
    def from_generators(cls, points, kind, generators=(), name=None) -> "FinSpace":
        if kind == SET:
            return cls.plain(points, name=name)
        if kind == MEAS:
            return cls.measurable(points, generators, name=name)
        return cls.topological(points, generators, name=name)

    @classmethod
    def from_family(cls, points, kind, family, name=None) -> "FinSpace":
        """Build from an explicit algebra or topology, checking its axioms."""
        pts = sort_points(points)
        fam = {frozenset(s) for s in family}
        _check_family(pts, fam, kind)
        return cls.from_generators(pts, kind, fam, name=name)

    @classmethod
    def discrete(cls, points, kind=SET, name=None) -> "FinSpace":
        return cls(points, kind, name=name)

    @classmethod
    def codiscrete(cls, points, kind, name=None) -> "FinSpace":
        pts = sort_points(points)
        if kind == MEAS:
            return cls(pts, MEAS, atoms=[frozenset(pts)] if pts else [], name=name)
        if kind == TOP:
            return cls(pts, TOP, down={p: frozenset(pts) for p in pts}, name=name)
        return cls(pts, SET, name=name)

    # identity -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, FinSpace):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.kind == other.kind
            and self.points == other.points
            and self._atoms == other._atoms
            and self._down == other._down
        )

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x):
        return x in self.pointset

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FinSpace{label} {self.kind} |{len(self.points)}|>"

    def sort_key(self):
        return (self.kind, tuple(point_key(p) for p in self.points))

    @cached_property
    def pointset(self) -> frozenset:
        return frozenset(self.points)

    # uniform object protocol shared with lazily enumerated objects

    finite = True

    def contains(self, x) -> bool:
        return x in self.pointset

    def iter_points(self, limit: int | None = None) -> Iterator:
        if limit is not None and len(self.points) > limit:
            raise TooLarge(f"{self!r} has more than {limit} points")
        return iter(self.points)

    def random_point(self, rng):
        return self.points[rng.randrange(len(self.points))]

    def renamed(self, name: str) -> "FinSpace":
        out = FinSpace(self.points, self.kind, atoms=self._atoms, down=self._down, name=name)
        return out

    # measurable structure ---------------------------------------------------

    @property
    def atoms(self) -> tuple[frozenset, ...]:
        if self.kind != MEAS:
            raise StructureError(f"{self!r} carries no algebra")
        return self._atoms

    @cached_property
    def _atom_index(self) -> dict:
        return {p: a for a in self._atoms for p in a}

    def atom_of(self, x) -> frozenset:
        try:
            return self._atom_index[x]
        except KeyError:
            raise StructureError(f"unknown point {fmt_point(x)}") from None

    @cached_property
    def measurable_sets(self) -> frozenset:
        atoms = self.atoms
        out = set()
        for r in range(len(atoms) + 1):
            for combo in itertools.combinations(atoms, r):
                out.add(frozenset().union(*combo))
        return frozenset(out)

    def is_measurable(self, s) -> bool:
        s = frozenset(s)
        return all(a <= s or not (a & s) for a in self.atoms) and s <= self.pointset

    # topological structure --------------------------------------------------

    def _require_top(self):
        if self.kind != TOP:
            raise StructureError(f"{self!r} carries no topology")

    def down(self, x) -> frozenset:
        """Closure of the point ``x``."""
        self._require_top()
        return self._down[x]

    @cached_property
    def _up(self) -> dict:
        self._require_top()
        return {p: frozenset(q for q in self.points if p in self._down[q]) for p in self.points}

    def up(self, x) -> frozenset:
        """Smallest open neighbourhood of ``x``."""
        return self._up[x]

    def leq(self, x, y) -> bool:
        """Specialization order: ``x`` lies in the closure of ``y``."""
        self._require_top()
        return x in self._down[y]

    def closure(self, s) -> frozenset:
        self._require_top()
        s = frozenset(s)
        if not s <= self.pointset:
            raise StructureError("closure of a set outside the carrier")
        return frozenset().union(*(self._down[x] for x in s)) if s else frozenset()

    def is_closed(self, s) -> bool:
        self._require_top()
        s = frozenset(s)
        return s <= self.pointset and all(self._down[x] <= s for x in s)

    def is_open(self, s) -> bool:
        self._require_top()
        s = frozenset(s)
        return s <= self.pointset and all(self._up[x] <= s for x in s)

    def iter_closed_sets(self) -> Iterator[frozenset]:
        self._require_top()
        return _iter_downsets(self.points, self._down)

    @cached_property
    def closed_sets(self) -> tuple[frozenset, ...]:
        return sort_points(self.iter_closed_sets())

    @cached_property
    def opens(self) -> frozenset:
        carrier = self.pointset
        return frozenset(carrier - c for c in self.closed_sets)

    # generic ----------------------------------------------------------------

    @property
    def structure(self) -> frozenset | None:
        """The explicit algebra or topology, or ``None`` for a plain set."""
        if self.kind == MEAS:
            return self.measurable_sets
        if self.kind == TOP:
            return self.opens
        return None

    def mkey(self, x):
        """Key of the smallest measurable piece containing ``x``."""
        if self.kind == MEAS:
            return self.atom_of(x)
        if x not in self.pointset:
            raise StructureError(f"unknown point {fmt_point(x)}")
        return x

    def mkeys(self) -> tuple:
        return self._atoms if self.kind == MEAS else self.points

    @cached_property
    def _reps(self) -> dict:
        return {a: min(a, key=point_key) for a in self._atoms}

    def mrep(self, key):
        return self._reps[key] if self.kind == MEAS else key

    def as_kind(self, kind: str) -> "FinSpace":
        """View as another kind: plain sets become discrete, structure is forgotten going to plain."""
        if kind == self.kind:
            return self
        if kind == SET:
            return FinSpace(self.points, SET, name=self.name)
        if self.kind == SET:
            return FinSpace(self.points, kind, name=self.name)
        raise StructureError(f"cannot view a {self.kind} space as {kind}")


def atoms(X: FinSpace) -> tuple[frozenset, ...]:
    return X.atoms


def closure(S, X: FinSpace) -> frozenset:
    return X.closure(S)


@lru_cache(maxsize=None)
def unit_space(kind: str = SET) -> FinSpace:
    return FinSpace([()], kind, name="1")


@lru_cache(maxsize=4096)
def product_many(spaces: tuple[FinSpace, ...]) -> FinSpace:
    """Finite product; points are tuples with one coordinate per factor."""
    kinds = {s.kind for s in spaces}
    if len(kinds) > 1:
        raise StructureError(f"cannot take a product of mixed kinds {sorted(kinds)}")
    kind = kinds.pop() if kinds else SET
    pts = [tuple(c) for c in itertools.product(*(s.points for s in spaces))]
    name = "*".join(s.name or "?" for s in spaces) if spaces else "1"
    if kind == MEAS:
        atoms_ = [frozenset(itertools.product(*combo)) for combo in itertools.product(*(s.atoms for s in spaces))]
        return FinSpace(pts, MEAS, atoms=atoms_, name=name)
    if kind == TOP:
        down = {p: frozenset(itertools.product(*(s.down(c) for s, c in zip(spaces, p)))) for p in pts}
        return FinSpace(pts, TOP, down=down, name=name)
    return FinSpace(pts, SET, name=name)


def product(X: FinSpace, Y: FinSpace) -> tuple[FinSpace, "BaseMap", "BaseMap"]:
    """Binary product together with its two projections."""
    P = product_many((X, Y))
    p1 = BaseMap(P, X, {p: p[0] for p in P.points})
    p2 = BaseMap(P, Y, {p: p[1] for p in P.points})
    return P, p1, p2


def power(X: FinSpace, n: int) -> FinSpace:
    return product_many((X,) * n)


# ---------------------------------------------------------------------------
# maps


class BaseMap:
    """A structure-preserving map between finite spaces, given by its table."""

    __slots__ = ("domain", "codomain", "table", "_hash")

    def __init__(self, domain: FinSpace, codomain: FinSpace, table: Mapping | Callable, *, check: bool = True):
        if callable(table) and not isinstance(table, Mapping):
            table = {x: table(x) for x in domain.points}
        tab = {x: table[x] for x in domain.points} if check else dict(table)
        self.domain = domain
        self.codomain = codomain
        self.table = tab
        if check:
            if set(table) != domain.pointset:
                raise StructureError("map table must be total on the domain")
            for x, y in tab.items():
                if y not in codomain.pointset:
                    raise StructureError(f"{fmt_point(x)} maps outside the codomain to {fmt_point(y)}")
            if not preserves_structure(domain, codomain, tab):
                raise StructureError("map does not preserve structure")
        self._hash = hash((domain, codomain, tuple(tab[x] for x in domain.points)))

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        return equal_maps(self, other) if isinstance(other, BaseMap) else NotImplemented

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{fmt_point(x)}->{fmt_point(y)}" for x, y in self.table.items())
        return f"BaseMap({body})"

    def sort_key(self):
        return tuple(point_key(self.table[x]) for x in self.domain.points)

    def fmt(self):
        return "{" + ", ".join(f"{fmt_point(x)} -> {fmt_point(y)}" for x, y in self.table.items()) + "}"


def preserves_structure(domain: FinSpace, codomain: FinSpace, table: Mapping) -> bool:
    if codomain.kind == SET or domain.kind == SET and codomain.kind == SET:
        return True
    if codomain.kind == MEAS:
        if domain.kind != MEAS:
            return False
        return all(len({codomain.atom_of(table[x]) for x in a}) == 1 for a in domain.atoms)
    if domain.kind != TOP:
        return False
    return all(codomain.leq(table[y], table[x]) for x in domain.points for y in domain.down(x))


def identity(X: FinSpace) -> BaseMap:
    return BaseMap(X, X, {x: x for x in X.points}, check=False)


def compose(f: BaseMap, g: BaseMap) -> BaseMap:
    """``g`` after ``f``: first apply ``f``, then ``g``."""
    if f.codomain != g.domain:
        raise StructureError("compose: codomain of the first map must equal the domain of the second")
    return BaseMap(f.domain, g.codomain, {x: g.table[f.table[x]] for x in f.domain.points}, check=False)


def equal_maps(f: BaseMap, g: BaseMap) -> bool:
    return f.domain == g.domain and f.codomain == g.codomain and f.table == g.table


def all_maps(X: FinSpace, Y: FinSpace) -> Iterator[BaseMap]:
    """Every structure-preserving map ``X -> Y`` in lexicographic order."""
    for images in itertools.product(Y.points, repeat=len(X.points)):
        tab = dict(zip(X.points, images))
        if preserves_structure(X, Y, tab):
            yield BaseMap(X, Y, tab, check=False)


def is_iso(f: BaseMap) -> bool:
    if len(set(f.table.values())) != len(f.domain.points) or len(f.domain) != len(f.codomain):
        return False
    inv = {y: x for x, y in f.table.items()}
    return preserves_structure(f.codomain, f.domain, inv)


def inverse(f: BaseMap) -> BaseMap:
    if not is_iso(f):
        raise StructureError("map is not an isomorphism")
    return BaseMap(f.codomain, f.domain, {y: x for x, y in f.table.items()}, check=False)


# ---------------------------------------------------------------------------
# enumeration of small structures


def all_partitions(points: Sequence) -> Iterator[list[frozenset]]:
    pts = list(points)
    if not pts:
        yield []
        return
    first, rest = pts[0], pts[1:]
    for part in all_partitions(rest):
        yield [frozenset([first])] + part
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1:]


def all_algebras(points: Sequence) -> Iterator[FinSpace]:
    for part in all_partitions(sort_points(points)):
        yield FinSpace(points, MEAS, atoms=part)


def all_topologies(points: Sequence, up_to_homeomorphism: bool = False) -> list[FinSpace]:
    """All topologies on a small carrier (as preorders), optionally one per homeomorphism class."""
    pts = sort_points(points)
    n = len(pts)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out: list[FinSpace] = []
    seen: set = set()
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = {(i, i) for i in range(n)} | {p for p, b in zip(pairs, bits) if b}
        if any((i, k) not in rel for (i, j) in rel for (j2, k) in rel if j == j2):
            continue
        if up_to_homeomorphism:
            canon = min(
                tuple(sorted((perm[i], perm[j]) for i, j in rel))
                for perm in itertools.permutations(range(n))
            )
            if canon in seen:
                continue
            seen.add(canon)
        # (i, j) in rel means pts[i] <= pts[j]
        down = {pts[j]: frozenset(pts[i] for i in range(n) if (i, j) in rel) for j in range(n)}
        out.append(FinSpace(pts, TOP, down=down))
    return out


def is_t0(X: FinSpace) -> bool:
    return all(X.down(x) != X.down(y) for x, y in itertools.combinations(X.points, 2))


def kolmogorov_quotient(X: FinSpace) -> tuple[FinSpace, BaseMap]:
    """T0 quotient of a finite topological space, with the quotient map."""
    classes = {x: frozenset(y for y in X.points if X.down(y) == X.down(x)) for x in X.points}
    pts = sort_points(classes.values())
    down = {c: frozenset(classes[y] for y in X.down(next(iter(c)))) for c in pts}
    Q = FinSpace(pts, TOP, down=down)
    return Q, BaseMap(X, Q, classes)
