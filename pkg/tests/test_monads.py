import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effects_lab.core import MEAS, TOP, FinSpace, StructureError, product_many
from effects_lab.monads import NOTHING, Just, Measure, ReaderVal, dist, get_monad, giry, hoare, maybe, reader, subgiry
from effects_lab.monads.finite import Reader
from effects_lab.monads.hoare import lower_vietoris_space
from effects_lab.monads.laws import kleisli_laws, law_suite

ALL = ["giry", "subgiry", "dist", "maybe", "reader", "hoare"]

BOOL = FinSpace.plain(["ff", "tt"], name="bool")


def space_for(T, n=2):
    pts = "abcd"[:n]
    if T.kind == TOP:
        return FinSpace.topological(pts, [pts[:1]], name=f"top{n}")
    if T.kind == MEAS:
        return FinSpace.measurable(pts, [pts[:2]], name=f"meas{n}")
    return FinSpace.plain(pts, name=f"set{n}")


def test_measure_is_canonical():
    assert Measure({"a": F(1, 2), "b": F(1, 2)}) == Measure([("b", F(1, 2)), ("a", F(1, 4)), ("a", F(1, 4))])
    assert Measure({"a": 0}) == Measure()
    with pytest.raises(StructureError):
        Measure({"a": -1})


def test_dist_multiplication_by_hand():
    X = BOOL
    p, q = Measure({"tt": 1}), Measure({"tt": F(1, 2), "ff": F(1, 2)})
    rho = Measure({p: F(1, 3), q: F(2, 3)})
    assert dist.mu(rho, X) == Measure({"tt": F(2, 3), "ff": F(1, 3)})
    pair = dist.nabla(q, p, X, X)
    assert pair == Measure({("ff", "tt"): F(1, 2), ("tt", "tt"): F(1, 2)})


def test_giry_lives_on_atoms():
    X = FinSpace.codiscrete("ab", MEAS)
    assert giry.eta("a", X) == giry.eta("b", X)
    assert giry.is_element(Measure({frozenset("ab"): 1}), X)
    assert not giry.is_element(Measure({frozenset("ab"): F(1, 2)}), X)
    assert subgiry.is_element(Measure({frozenset("ab"): F(1, 2)}), X)
    assert subgiry.is_element(Measure(), X)


def test_maybe_and_reader_by_hand():
    X = BOOL
    assert maybe.mu(Just(NOTHING), X) is NOTHING
    assert maybe.nabla(Just("tt"), NOTHING, X, X) is NOTHING
    assert maybe.nabla(Just("tt"), Just("ff"), X, X) == Just(("tt", "ff"))
    r = ReaderVal(ReaderVal("a", "b"), ReaderVal("c", "d"))
    assert reader.mu(r, X) == ReaderVal("a", "d")


def test_hoare_closes_images():
    S = FinSpace.topological([0, 1], [[1]])
    assert hoare.eta(1, S) == frozenset([0, 1])
    assert hoare.fmap(lambda x: 1, S, S, frozenset([0])) == frozenset([0, 1])
    assert not hoare.is_element(frozenset([1]), S)
    H = lower_vietoris_space(S)
    assert len(H.points) == 3  # empty, {0}, {0,1}


@pytest.mark.parametrize("name", ALL)
def test_law_suite_passes(name):
    T = get_monad(name)
    spaces = [space_for(T, n) for n in (1, 2, 3)]
    recs = law_suite(T, spaces, budget=80, seed=1) + kleisli_laws(T, spaces, budget=40, seed=1)
    bad = [r for r in recs if not r.ok]
    assert not bad, bad[0]
    checks = {r.check.split(":")[1].split("[")[0] for r in recs}
    assert {"left-unit", "right-unit", "associativity", "commutativity"} <= checks


def test_finite_monads_are_enumerated_exhaustively():
    X = space_for(maybe, 2)
    recs = law_suite(maybe, [X], budget=500)
    assert all(r.details.get("exhaustive") for r in recs if "unit" in r.check)


def test_affine_flags():
    assert [get_monad(m).affine for m in ALL] == [True, False, True, False, True, False]


class SwappedReader(Reader):
    name = "swapped"

    def mu(self, rho, X):
        return ReaderVal(rho.at0.at1, rho.at1.at0)


def test_law_suite_catches_a_broken_multiplication():
    recs = law_suite(SwappedReader(), [BOOL], budget=50)
    assert any(not r.ok and "left-unit" in r.check for r in recs)


@st.composite
def dist_elements(draw, pts=("a", "b", "c")):
    ks = draw(st.lists(st.sampled_from(pts), min_size=1, max_size=3, unique=True))
    ws = draw(st.lists(st.integers(1, 5), min_size=len(ks), max_size=len(ks)))
    s = sum(ws)
    return Measure({k: F(w, s) for k, w in zip(ks, ws)})


X3 = FinSpace.plain("abc")


def kleisli(table):
    return lambda x: table[x]


@settings(max_examples=80, deadline=None)
@given(dist_elements(), st.fixed_dictionaries({x: dist_elements() for x in "abc"}), st.fixed_dictionaries({x: dist_elements() for x in "abc"}))
def test_bind_associates(t, f, g):
    lhs = dist.bind(dist.bind(t, kleisli(f), X3, X3), kleisli(g), X3, X3)
    rhs = dist.bind(t, lambda x: dist.bind(f[x], kleisli(g), X3, X3), X3, X3)
    assert lhs == rhs
    assert dist.bind(dist.eta("a", X3), kleisli(f), X3, X3) == f["a"]
    assert dist.bind(t, lambda x: dist.eta(x, X3), X3, X3) == t


@settings(max_examples=80, deadline=None)
@given(dist_elements(), dist_elements())
def test_pairing_commutes(p, q):
    # sequencing in either order gives the same joint distribution
    P = product_many((X3, X3))
    first = dist.bind(p, lambda x: dist.fmap(lambda y: (x, y), X3, P, q), X3, P)
    second = dist.bind(q, lambda y: dist.fmap(lambda x: (x, y), X3, P, p), X3, P)
    assert first == second == dist.nabla(p, q, X3, X3)
    assert dist.nabla(p, q, X3, X3).total == 1
