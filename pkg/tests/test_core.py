import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effects_lab.core import (
    MEAS,
    SET,
    TOP,
    BaseMap,
    FinSpace,
    StructureError,
    all_algebras,
    all_maps,
    all_topologies,
    compose,
    identity,
    is_iso,
    is_t0,
    kolmogorov_quotient,
    power,
    product,
)


def brute_topologies(n):
    """Families of subsets of range(n) closed under union and intersection, containing empty and full."""
    pts = range(n)
    subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(pts, r)]
    full, empty = frozenset(pts), frozenset()
    middle = [s for s in subsets if s not in (full, empty)]
    out = 0
    for r in range(len(middle) + 1):
        for combo in itertools.combinations(middle, r):
            fam = set(combo) | {full, empty}
            if all(a | b in fam and a & b in fam for a in fam for b in fam):
                out += 1
    return out


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_topology_count_matches_brute_force(n):
    assert len(all_topologies(list(range(n)))) == brute_topologies(n)


def test_topology_counts_up_to_homeomorphism():
    # distinct topologies on 0..4 points, and their homeomorphism classes
    assert [len(all_topologies(list(range(n)))) for n in range(5)] == [1, 1, 4, 29, 355]
    assert [len(all_topologies(list(range(n)), up_to_homeomorphism=True)) for n in range(5)] == [1, 1, 3, 9, 33]


def test_algebra_count_is_partition_count():
    assert [sum(1 for _ in all_algebras(list(range(n)))) for n in range(1, 6)] == [1, 2, 5, 15, 52]


def test_sierpinski_square_has_six_opens():
    S = FinSpace.topological([0, 1], [[1]])
    P, _, _ = product(S, S)
    assert len(P.opens) == 6


def test_generators_give_the_closure():
    X = FinSpace.topological("abc", [["a"], ["b"]])
    assert X.opens == {frozenset(), frozenset("a"), frozenset("b"), frozenset("ab"), frozenset("abc")}
    assert X.closure({"a"}) == frozenset("ac")
    M = FinSpace.measurable("abcd", [["a", "b"]])
    assert set(M.atoms) == {frozenset("ab"), frozenset("cd")}
    assert M.is_measurable({"c", "d"}) and not M.is_measurable({"a", "b", "d"})


def test_bad_structures_are_rejected():
    with pytest.raises(StructureError):
        FinSpace.from_family("ab", TOP, [set(), {"a"}, {"b"}])
    with pytest.raises(StructureError):
        FinSpace("ab", MEAS, atoms=[{"a"}])
    with pytest.raises(StructureError):
        FinSpace("a", "banana")


def test_continuity_and_measurability_are_enforced():
    S = FinSpace.topological([0, 1], [[1]])
    with pytest.raises(StructureError):
        BaseMap(S, S, {0: 1, 1: 0})
    BaseMap(S, S, {0: 0, 1: 1})
    C = FinSpace.codiscrete("ab", MEAS)
    D = FinSpace.discrete("ab", MEAS)
    with pytest.raises(StructureError):
        BaseMap(C, D, {"a": "a", "b": "b"})
    assert is_iso(BaseMap(D, D, {"a": "b", "b": "a"}))
    assert not is_iso(BaseMap(D, C, {"a": "a", "b": "b"}))


def test_as_kind():
    X = FinSpace.plain("ab")
    assert X.as_kind(TOP).opens == {frozenset(), frozenset("a"), frozenset("b"), frozenset("ab")}
    with pytest.raises(StructureError):
        FinSpace.codiscrete("ab", TOP).as_kind(MEAS)


tops3 = all_topologies("abc")


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(tops3))
def test_kolmogorov_quotient_is_t0_and_universal(X):
    Q, q = kolmogorov_quotient(X)
    assert is_t0(Q)
    assert len(Q.points) == len({X.down(x) for x in X.points})
    # every continuous map into a T0 space factors through q
    for Y in [T for T in all_topologies("ab") if is_t0(T)]:
        for f in all_maps(X, Y):
            factor = {c: f(next(iter(c))) for c in Q.points}
            g = BaseMap(Q, Y, factor)
            assert compose(q, g) == f


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(tops3), st.sampled_from(tops3))
def test_product_projections_and_pairing(X, Y):
    P, p1, p2 = product(X, Y)
    assert len(P.points) == 9
    assert compose(identity(P), p1) == p1
    # closures in the product are products of closures
    for x, y in P.points:
        assert P.down((x, y)) == frozenset(itertools.product(X.down(x), Y.down(y)))


def test_power_and_empty_product():
    X = FinSpace.plain("ab")
    assert len(power(X, 3).points) == 8
    assert power(X, 0).points == ((),)
