"""A stage-bounded model of the name-generation monad.

Objects are presheaves on finite sets and injections, truncated at a stage
bound ``K``: stage ``m`` is the name set ``{0, ..., m-1}`` and the presheaf
gives a value set per stage together with a renaming action along
injections.  An element of ``TX`` at stage ``a`` is a class ``(a, b, v)``: a
block of ``b`` freshly generated names ``a, ..., a+b-1`` and a value
``v in X(a+b)``.  Classes are kept in normal form: unused fresh names are
dropped and the remaining ones are put in the order-minimal arrangement.
Going past the stage bound raises ``TruncationError``; nothing wraps around.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .core import fmt_point, point_key, sort_points
from .monads.laws import cases
from .report import Record, record

DEFAULT_BOUND = 5


class TruncationError(RuntimeError):
    """A construction needs more names than the stage bound allows."""


class Name:
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def __eq__(self, other):
        return isinstance(other, Name) and self.index == other.index

    def __hash__(self):
        return hash(("name", self.index))

    def __repr__(self):
        return f"Name({self.index})"

    def sort_key(self):
        return (self.index,)

    def fmt(self):
        return f"${self.index}"


@dataclass(frozen=True)
class NameClass:
    stage: int
    block: int
    value: object

    def sort_key(self):
        return (self.stage, self.block, point_key(self.value))

    def fmt(self):
        fresh = ",".join(f"${self.stage + j}" for j in range(self.block))
        body = fmt_point(self.value)
        return f"new({fresh}).{body}" if self.block else f"ret {body}"


def _identity(n: int) -> dict:
    return {i: i for i in range(n)}


def _shift(a: int, src: Sequence[int], dst_start: int) -> dict:
    return {a + j: dst_start + s for j, s in enumerate(src)}


# ---------------------------------------------------------------------------
# staged objects


class StagedObject:
    """A presheaf on injections, restricted to stages ``0..bound``.

    ``rename(v, mapping, src, dst)`` is the action of an injection from stage
    ``src`` to stage ``dst`` given as a dict on names (it only needs to be
    defined on the names ``v`` actually uses).  ``support`` returns the names
    a value uses, or ``None`` when the object is not known to be nominal.
    """

    name = "?"
    bound = DEFAULT_BOUND
    # renaming substitutes names inside the value and changes nothing else
    syntactic = False

    def values(self, m: int) -> tuple:
        raise NotImplementedError

    def contains(self, v, m: int) -> bool:
        return v in set(self.values(m))

    def rename(self, v, mapping: dict, src: int, dst: int):
        raise NotImplementedError

    def support(self, v, m: int) -> frozenset | None:
        return None

    def fmt(self, v) -> str:
        return fmt_point(v)

    def __repr__(self):
        return f"<staged {self.name}>"

    def sort_key(self):
        return (self.name,)

    def _check_stage(self, m: int) -> None:
        if m > self.bound:
            raise TruncationError(f"{self.name}: stage {m} exceeds bound {self.bound}")


def _rename_term(v, mapping: dict):
    if isinstance(v, Name):
        return Name(mapping[v.index])
    if isinstance(v, tuple):
        return tuple(_rename_term(c, mapping) for c in v)
    return v


def _term_names(v) -> frozenset:
    if isinstance(v, Name):
        return frozenset([v.index])
    if isinstance(v, tuple):
        return frozenset().union(*(_term_names(c) for c in v)) if v else frozenset()
    return frozenset()


class NamesObject(StagedObject):
    """The object of names: stage ``m`` holds the names ``$0 .. $(m-1)``."""

    def __init__(self, bound: int = DEFAULT_BOUND):
        self.name = "names"
        self.bound = bound
        self.syntactic = True

    def values(self, m):
        self._check_stage(m)
        return tuple(Name(i) for i in range(m))

    def contains(self, v, m):
        return isinstance(v, Name) and 0 <= v.index < m

    def rename(self, v, mapping, src, dst):
        return Name(mapping[v.index])

    def support(self, v, m):
        return frozenset([v.index])


class ConstObject(StagedObject):
    """A constant presheaf: the same name-free values at every stage."""

    def __init__(self, labels: Iterable, name: str = "const", bound: int = DEFAULT_BOUND):
        self.labels = sort_points(labels)
        self.name = name
        self.bound = bound
        self.syntactic = not any(_term_names(v) for v in self.labels)

    def values(self, m):
        self._check_stage(m)
        return self.labels

    def contains(self, v, m):
        return v in self.labels

    def rename(self, v, mapping, src, dst):
        return v

    def support(self, v, m):
        return frozenset()


class ProdStaged(StagedObject):
    def __init__(self, factors: Sequence[StagedObject]):
        self.factors = tuple(factors)
        self.name = "*".join(f.name for f in self.factors) if self.factors else "1"
        self.bound = min((f.bound for f in self.factors), default=DEFAULT_BOUND)
        self.syntactic = all(f.syntactic for f in self.factors)

    def values(self, m):
        return tuple(itertools.product(*(f.values(m) for f in self.factors)))

    def contains(self, v, m):
        return (
            isinstance(v, tuple)
            and len(v) == len(self.factors)
            and all(f.contains(c, m) for f, c in zip(self.factors, v))
        )

    def rename(self, v, mapping, src, dst):
        return tuple(f.rename(c, mapping, src, dst) for f, c in zip(self.factors, v))

    def support(self, v, m):
        out = frozenset()
        for f, c in zip(self.factors, v):
            s = f.support(c, m)
            if s is None:
                return None
            out |= s
        return out

    def fmt(self, v):
        return "(" + ",".join(f.fmt(c) for f, c in zip(self.factors, v)) + ")"


class SumStaged(StagedObject):
    def __init__(self, left: StagedObject, right: StagedObject):
        self.parts = (left, right)
        self.name = f"{left.name}+{right.name}"
        self.bound = min(left.bound, right.bound)
        self.syntactic = left.syntactic and right.syntactic

    def values(self, m):
        return tuple(("inl", v) for v in self.parts[0].values(m)) + tuple(("inr", v) for v in self.parts[1].values(m))

    def contains(self, v, m):
        return isinstance(v, tuple) and len(v) == 2 and v[0] in ("inl", "inr") and self._part(v).contains(v[1], m)

    def _part(self, v):
        return self.parts[0] if v[0] == "inl" else self.parts[1]

    def rename(self, v, mapping, src, dst):
        return (v[0], self._part(v).rename(v[1], mapping, src, dst))

    def support(self, v, m):
        return self._part(v).support(v[1], m)


class TableObject(StagedObject):
    """Explicit per-stage value tables with syntactic renaming of names.

    No nominal structure is assumed, so normal forms of its ``T``-classes are
    found by searching preimages along all injections.
    """

    def __init__(self, tables: dict, name: str = "table"):
        self.tables = {m: sort_points(vs) for m, vs in tables.items()}
        self.name = name
        self.bound = max(self.tables) if self.tables else 0
        self.syntactic = True

    def values(self, m):
        if m not in self.tables:
            raise TruncationError(f"{self.name}: no table for stage {m}")
        return self.tables[m]

    def contains(self, v, m):
        return m in self.tables and v in self.tables[m]

    def rename(self, v, mapping, src, dst):
        return _rename_term(v, mapping)


def positive_object(bound: int = DEFAULT_BOUND) -> TableObject:
    """Not nominal: the value ``+`` exists at every nonempty stage but has no support."""
    tables = {0: ("*",)}
    tables.update({m: ("*", "+") for m in range(1, bound + 1)})
    return TableObject(tables, name="positive")


def names_table(bound: int = DEFAULT_BOUND) -> TableObject:
    return TableObject({m: tuple(Name(i) for i in range(m)) for m in range(bound + 1)}, name="names-table")


# ---------------------------------------------------------------------------
# the monad


class TObject(StagedObject):
    """``TX`` truncated at the stage bound; values are normalized ``NameClass`` es."""

    def __init__(self, X: StagedObject, bound: int | None = None):
        self.X = X
        self.bound = X.bound if bound is None else bound
        self.name = f"T({X.name})"
        self._values: dict = {}
        self._normal: dict = {}

    def normalize(self, a: int, b: int, v) -> NameClass:
        key = (a, b, v)
        hit = self._normal.get(key)
        if hit is None:
            hit = self._normal[key] = self._normalize(a, b, v)
        return hit

    def _normalize(self, a: int, b: int, v) -> NameClass:
        # raw intermediate stages may pass the bound; only the normal form has to fit
        X = self.X
        sup = X.support(v, a + b)
        if sup is None:
            return self._normalize_search(a, b, v)
        used = sorted(i for i in sup if i >= a)
        bp = len(used)
        self._check_fits(a, bp)
        mapping = _identity(a)
        mapping.update({u: a + j for j, u in enumerate(used)})
        w = X.rename(v, mapping, a + b, a + bp)
        best = min(
            (X.rename(w, {**_identity(a), **_shift(a, perm, a)}, a + bp, a + bp) for perm in itertools.permutations(range(bp))),
            key=point_key,
        )
        return NameClass(a, bp, best)

    def _normalize_search(self, a: int, b: int, v) -> NameClass:
        if self.X.syntactic:
            return self._normalize_syntactic(a, b, v)
        return self._normalize_brute(a, b, v)

    def _normalize_brute(self, a: int, b: int, v) -> NameClass:
        X = self.X
        for bp in range(b + 1):
            self._check_fits(a, bp)
            found = []
            for iota in itertools.permutations(range(b), bp):
                mapping = {**_identity(a), **_shift(a, iota, a)}
                for w in X.values(a + bp):
                    try:
                        hit = X.rename(w, mapping, a + bp, a + b) == v
                    except TruncationError:
                        hit = False
                    if hit:
                        found.append(w)
            if found:
                best = min(
                    (
                        X.rename(w, {**_identity(a), **_shift(a, perm, a)}, a + bp, a + bp)
                        for w in found
                        for perm in itertools.permutations(range(bp))
                    ),
                    key=point_key,
                )
                return NameClass(a, bp, best)
        raise ValueError(f"{fmt_point(v)} is not a value of {X.name} at stage {a + b}")

    def _normalize_syntactic(self, a: int, b: int, v) -> NameClass:
        # a preimage along an injection is v with its fresh names pulled back, so only
        # the placement of the names v actually uses has to be searched
        X = self.X
        used = sorted(i for i in _term_names(v) if i >= a)
        for bp in range(len(used), b + 1):
            self._check_fits(a, bp)
            found = []
            for pos in itertools.permutations(range(bp), len(used)):
                w = _rename_term(v, {**_identity(a), **{u: a + p for u, p in zip(used, pos)}})
                if X.contains(w, a + bp):
                    found.append(w)
            if found:
                best = min(
                    (
                        X.rename(w, {**_identity(a), **_shift(a, perm, a)}, a + bp, a + bp)
                        for w in found
                        for perm in itertools.permutations(range(bp))
                    ),
                    key=point_key,
                )
                return NameClass(a, bp, best)
        raise ValueError(f"{fmt_point(v)} is not a value of {X.name} at stage {a + b}")

    def _check_fits(self, a: int, b: int) -> None:
        if a + b > self.bound:
            raise TruncationError(f"{self.name}: a class at stage {a} needs {b} fresh names, bound is {self.bound}")

    def values(self, m: int) -> tuple:
        self._check_stage(m)
        if m not in self._values:
            out = set()
            for b in range(self.bound - m + 1):
                for v in self.X.values(m + b):
                    out.add(self.normalize(m, b, v))
            self._values[m] = sort_points(out)
        return self._values[m]

    def contains(self, v, m):
        return (
            isinstance(v, NameClass)
            and v.stage == m
            and m + v.block <= self.bound
            and self.X.contains(v.value, m + v.block)
            and self.normalize(m, v.block, v.value) == v
        )

    def rename(self, c: NameClass, mapping: dict, src: int, dst: int) -> NameClass:
        m, b = c.stage, c.block
        inner = dict(mapping)
        inner.update({m + j: dst + j for j in range(b)})
        return self.normalize(dst, b, self.X.rename(c.value, inner, m + b, dst + b))

    def support(self, c: NameClass, m: int):
        s = self.X.support(c.value, m + c.block)
        if s is None:
            return None
        return frozenset(i for i in s if i < m)

    def fmt(self, c):
        return c.fmt()


def tobject(X: StagedObject, bound: int | None = None) -> TObject:
    return TObject(X, bound)


def ng_eta(X: StagedObject, a: int, v) -> NameClass:
    return NameClass(a, 0, v)


def ng_mu(TX: TObject, a: int, rho: NameClass) -> NameClass:
    """Flatten: concatenate the outer and inner blocks of fresh names."""
    c = rho.value
    return TX.normalize(a, rho.block + c.block, c.value)


def ng_fmap(f: Callable, TX: TObject, TY: TObject, a: int, t: NameClass) -> NameClass:
    """``f(m, v)`` is a stage-indexed natural map ``X -> Y``."""
    return TY.normalize(a, t.block, f(a + t.block, t.value))


def ng_nabla_many(TXs: Sequence[TObject], a: int, elems: Sequence[NameClass], TP: TObject) -> NameClass:
    """Pair up values, giving each component's fresh block its own names."""
    total = sum(e.block for e in elems)
    parts = []
    offset = a
    for TX, e in zip(TXs, elems):
        mapping = {**_identity(a), **_shift(a, range(e.block), offset)}
        parts.append(TX.X.rename(e.value, mapping, a + e.block, a + total))
        offset += e.block
    return TP.normalize(a, total, tuple(parts))


def ng_nabla(TX: TObject, TY: TObject, a: int, p: NameClass, q: NameClass, TP: TObject) -> NameClass:
    return ng_nabla_many((TX, TY), a, (p, q), TP)


def ng_observe_n(TTX: TObject, a: int, rho: NameClass, n: int) -> NameClass:
    """Force the inner computation ``n`` times, each run with its own fresh names."""
    TX = TTX.X
    X = TX.X
    c = rho.value
    base = a + rho.block
    width = c.block
    TP = TObject(ProdStaged((X,) * n), TTX.bound)
    parts = []
    for i in range(n):
        mapping = {**_identity(base), **_shift(base, [i * width + j for j in range(width)], base)}
        parts.append(X.rename(c.value, mapping, base + width, base + n * width))
    return TP.normalize(a, rho.block + n * width, tuple(parts))


def ng_observe_n_composite(TTX: TObject, a: int, rho: NameClass, n: int) -> NameClass:
    """The same observation built from ``mu``, ``fmap`` and the n-ary pairing."""
    TX = TTX.X
    X = TX.X
    Xn = ProdStaged((X,) * n)
    TP = TObject(Xn, TTX.bound)
    TTP = TObject(TP, TTX.bound)

    def diag_nabla(m, c):
        return ng_nabla_many((TX,) * n, m, (c,) * n, TP)

    return ng_mu(TP, a, ng_fmap(diag_nabla, TTX, TTP, a, rho))


# ---------------------------------------------------------------------------
# checks


def _sample(values: Sequence, budget: int, rng: random.Random) -> tuple[list, bool]:
    values = list(values)
    if len(values) <= budget:
        return values, True
    return sorted(rng.sample(values, budget), key=point_key), False


def _try(fn):
    try:
        return fn()
    except TruncationError:
        return "truncated"


def ng_law_suite(X: StagedObject, K: int = DEFAULT_BOUND, budget: int = 300, seed: int = 0) -> list[Record]:
    """Monad, naturality and pairing laws at every stage, skipping cases that overflow the bound."""
    rng = random.Random(f"ng:{seed}:{X.name}")
    TX = TObject(X, K)
    TTX = TObject(TX, K)
    TTTX = TObject(TTX, K)
    XX = ProdStaged((X, X))
    TXX = TObject(XX, K)
    out: list[Record] = []
    counts: dict = {}
    bad: dict = {}
    skipped: dict = {}

    def check(law, fn, witness):
        try:
            ok = fn()
        except TruncationError:
            skipped[law] = skipped.get(law, 0) + 1
            return
        counts[law] = counts.get(law, 0) + 1
        if not ok and law not in bad:
            bad[law] = witness()

    swap = lambda m, z: (z[1], z[0])
    diag = lambda m, v: (v, v)
    TTXX = TObject(TXX, K)
    XXX_l = ProdStaged((XX, X))
    XXX_r = ProdStaged((X, XX))
    TXXX_l, TXXX_r = TObject(XXX_l, K), TObject(XXX_r, K)
    reassoc = lambda m, z: (z[0][0], (z[0][1], z[1]))
    unit_TX = lambda m, v: NameClass(m, 0, v)
    for a in range(K + 1):
        ts, _ = _sample(TX.values(a), budget, rng)
        rs, _ = _sample(TTX.values(a), budget, rng)
        ss, _ = _sample(TTTX.values(a), max(20, budget // 4), rng)
        for t in ts:
            check("left-unit", lambda: ng_mu(TX, a, NameClass(a, 0, t)) == t, t.fmt)
            check("right-unit", lambda: ng_mu(TX, a, ng_fmap(unit_TX, TX, TTX, a, t)) == t, t.fmt)
        for s in ss:
            check(
                "associativity",
                lambda: ng_mu(TX, a, ng_mu(TTX, a, s))
                == ng_mu(TX, a, ng_fmap(lambda m, r: ng_mu(TX, m, r), TTTX, TTX, a, s)),
                s.fmt,
            )
        for r in rs:
            # naturality of mu along the diagonal X -> X*X
            check(
                "mu-naturality",
                lambda: ng_fmap(diag, TX, TXX, a, ng_mu(TX, a, r))
                == ng_mu(TXX, a, ng_fmap(lambda m, c: ng_fmap(diag, TX, TXX, m, c), TTX, TTXX, a, r)),
                r.fmt,
            )
        for x, y in itertools.product(X.values(a), repeat=2):
            check(
                "nabla-unit-compat",
                lambda: ng_nabla(TX, TX, a, NameClass(a, 0, x), NameClass(a, 0, y), TXX) == NameClass(a, 0, (x, y)),
                lambda: f"{fmt_point(x)}, {fmt_point(y)}",
            )
        pairs, _ = cases([ts, ts], budget, rng)
        for p, q in pairs:
            wit = lambda: f"{p.fmt()} , {q.fmt()}"
            check(
                "nabla-symmetry",
                lambda: ng_fmap(swap, TXX, TXX, a, ng_nabla(TX, TX, a, p, q, TXX)) == ng_nabla(TX, TX, a, q, p, TXX),
                wit,
            )

            def commutes():
                # run p then q, and q then p, each through the strength
                left = ng_mu(TXX, a, ng_fmap(
                    lambda m, x: ng_nabla(TX, TX, m, NameClass(m, 0, x), TX.rename(q, _identity(a), a, m), TXX),
                    TX, TTXX, a, p))
                right = ng_mu(TXX, a, ng_fmap(
                    lambda m, y: ng_nabla(TX, TX, m, TX.rename(p, _identity(a), a, m), NameClass(m, 0, y), TXX),
                    TX, TTXX, a, q))
                return left == right == ng_nabla(TX, TX, a, p, q, TXX)

            check("commutativity", commutes, wit)
        triples, _ = cases([ts, ts, ts], max(20, budget // 3), rng)
        for p, q, r in triples:
            def assoc():
                left = ng_nabla(TXX, TX, a, ng_nabla(TX, TX, a, p, q, TXX), r, TXXX_l)
                right = ng_nabla(TX, TXX, a, p, ng_nabla(TX, TX, a, q, r, TXX), TXXX_r)
                return ng_fmap(reassoc, TXXX_l, TXXX_r, a, left) == right

            check("nabla-associativity", assoc, lambda: f"{p.fmt()} , {q.fmt()} , {r.fmt()}")

    for law in sorted(counts):
        out.append(
            record(
                f"namegen:{law}[{X.name}]",
                law not in bad,
                bad.get(law),
                seed,
                cases=counts[law],
                skipped_beyond_bound=skipped.get(law, 0),
                stage_bound=K,
            )
        )
    return out


def t1_check(K: int = DEFAULT_BOUND) -> Record:
    one = ConstObject([()], name="1", bound=K)
    T1 = TObject(one, K)
    sizes = {a: len(T1.values(a)) for a in range(K + 1)}
    return record("namegen:T1-is-terminal", all(n == 1 for n in sizes.values()), None, None, classes_per_stage=sizes)


def ng_observationality_experiment(X: StagedObject, K: int = DEFAULT_BOUND, stages: Iterable[int] = (0, 1)) -> Record:
    """Least distinguishing ``n`` for every pair of ``TTX`` classes whose computation fits the bound."""
    TX = TObject(X, K)
    TTX = TObject(TX, K)
    pairs = distinguished = skipped = 0
    worst = None
    violation = None
    undistinguished = None
    hist: dict = {}
    for a in stages:
        if a > K:
            continue
        elems = TTX.values(a)
        for r1, r2 in itertools.combinations(elems, 2):
            cap = r1.block + r2.block + 1
            need = a + max(r1.block + cap * r1.value.block, r2.block + cap * r2.value.block)
            if need > K:
                skipped += 1
                continue
            pairs += 1
            found = None
            for n in range(cap + 1):
                if ng_observe_n(TTX, a, r1, n) != ng_observe_n(TTX, a, r2, n):
                    found = n
                    break
            if found is None:
                undistinguished = undistinguished or f"{r1.fmt()} vs {r2.fmt()}"
                continue
            distinguished += 1
            hist[found] = hist.get(found, 0) + 1
            if worst is None or found > worst[0]:
                worst = (found, f"{r1.fmt()} vs {r2.fmt()}")
            if found > r1.block + r2.block + 1:
                violation = violation or f"{r1.fmt()} vs {r2.fmt()} needs n={found}"
    ok = violation is None and undistinguished is None
    return record(
        f"namegen:observationality[{X.name}]",
        ok,
        violation or undistinguished,
        None,
        pairs=pairs,
        distinguished=distinguished,
        skipped_beyond_bound=skipped,
        least_n_histogram={str(k): v for k, v in sorted(hist.items())},
        hardest_pair=None if worst is None else worst[1],
        bound_checked="n <= |b|+|b'|+1",
        stage_bound=K,
    )


def _injections(src: int, dst: int):
    for img in itertools.permutations(range(dst), src):
        yield {i: img[i] for i in range(src)}


def functoriality_failure(X: StagedObject, max_stage: int = 3):
    """Identity renamings fix values and renaming respects composition."""
    top = min(max_stage, X.bound)
    for m in range(top + 1):
        for v in X.values(m):
            if X.rename(v, _identity(m), m, m) != v:
                return f"identity moves {fmt_point(v)} at stage {m}"
    for m1, m2, m3 in itertools.product(range(top + 1), repeat=3):
        if not m1 <= m2 <= m3:
            continue
        for f in _injections(m1, m2):
            for g in list(_injections(m2, m3))[:6]:
                gf = {i: g[f[i]] for i in f}
                for v in X.values(m1):
                    w = X.rename(v, f, m1, m2)
                    if not X.contains(w, m2):
                        return f"renaming {fmt_point(v)} leaves {X.name}({m2})"
                    if X.rename(w, g, m2, m3) != X.rename(v, gf, m1, m3):
                        return f"composition fails on {fmt_point(v)}"
    return None


def nominal_check(X: StagedObject, max_stage: int = 3) -> tuple[bool, str | None]:
    """Pullbacks of injections go to pullbacks, on every square up to ``max_stage``."""
    bad = functoriality_failure(X, max_stage)
    if bad:
        return False, bad
    top = min(max_stage, X.bound)
    for m in range(top + 1):
        for r1 in range(m + 1):
            for S1 in itertools.combinations(range(m), r1):
                for r2 in range(m + 1):
                    for S2 in itertools.combinations(range(m), r2):
                        bad = _square_failure(X, m, S1, S2)
                        if bad:
                            return False, bad
    return True, None


def _square_failure(X: StagedObject, m: int, S1: tuple, S2: tuple) -> str | None:
    inter = sorted(set(S1) & set(S2))
    f1 = dict(enumerate(S1))
    f2 = dict(enumerate(S2))
    p1 = {k: S1.index(s) for k, s in enumerate(inter)}
    p2 = {k: S2.index(s) for k, s in enumerate(inter)}
    k = len(inter)
    image1: dict = {}
    for u in X.values(len(S1)):
        image1.setdefault(X.rename(u, f1, len(S1), m), []).append(u)
    matched = set()
    for w in X.values(len(S2)):
        z = X.rename(w, f2, len(S2), m)
        for u in image1.get(z, ()):
            matched.add((u, w))
    from_p = {}
    for v in X.values(k):
        pair = (X.rename(v, p1, k, len(S1)), X.rename(v, p2, k, len(S2)))
        if pair in from_p:
            return f"two values over {fmt_point(pair)} in square {S1},{S2} of stage {m}"
        from_p[pair] = v
    missing = matched - set(from_p)
    if missing:
        u, w = sorted(missing, key=point_key)[0]
        return f"({fmt_point(u)}, {fmt_point(w)}) has no common restriction in square {S1},{S2} of stage {m}"
    return None


def ng_fork_solutions(X: StagedObject, a: int, K: int = DEFAULT_BOUND) -> list[NameClass]:
    TX = TObject(X, K)
    TTX = TObject(TX, K)
    out = []
    for t in TX.values(a):
        try:
            lhs = NameClass(a, 0, t)
            rhs = ng_fmap(lambda m, v: NameClass(m, 0, v), TX, TTX, a, t)
        except TruncationError:
            continue
        if lhs == rhs:
            out.append(t)
    return out


def ng_sober_check(X: StagedObject, K: int = DEFAULT_BOUND, max_stage: int | None = None) -> tuple[bool, str | None]:
    """``e : X -> DX`` is a bijection at every stage."""
    top = K - 1 if max_stage is None else max_stage
    for a in range(top + 1):
        sols = set(ng_fork_solutions(X, a, K))
        image = {NameClass(a, 0, v) for v in X.values(a)}
        if sols != image:
            extra = sorted(sols - image, key=point_key)
            return False, f"stage {a}: fork solution {extra[0].fmt()} is not a unit" if extra else f"stage {a}"
    return True, None


def cospan_equivalent(X: StagedObject, a: int, b1: int, v1, b2: int, v2, K: int = DEFAULT_BOUND) -> bool:
    """Colimit equality by search: injections of both blocks into a common block send the values together."""
    for d in range(max(b1, b2), K - a + 1):
        for f in itertools.permutations(range(d), b1):
            m1 = {**_identity(a), **_shift(a, f, a)}
            x1 = X.rename(v1, m1, a + b1, a + d)
            for g in itertools.permutations(range(d), b2):
                m2 = {**_identity(a), **_shift(a, g, a)}
                if X.rename(v2, m2, a + b2, a + d) == x1:
                    return True
    return False


BUILTIN_STAGED = {
    "names": lambda K: NamesObject(K),
    "names2": lambda K: ProdStaged((NamesObject(K), NamesObject(K))),
    "bool": lambda K: ConstObject(["ff", "tt"], name="bool", bound=K),
    "names+1": lambda K: SumStaged(NamesObject(K), ConstObject([()], name="1", bound=K)),
    "positive": positive_object,
    "names-table": names_table,
}
