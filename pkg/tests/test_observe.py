import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effects_lab.core import FinSpace, all_topologies
from effects_lab.monads import NOTHING, Just, Measure, dist, giry, hoare, maybe, reader
from effects_lab.observe import (
    brute_observationality,
    definetti_demo,
    distinguish,
    marginal_failure,
    monoid_test,
    observe_n,
    permutation_failure,
    sampled_observationality,
)

BOOL = FinSpace.plain(["ff", "tt"], name="bool")


# outers over bool are finite mixtures of coins; observations only see the moments


@st.composite
def coin_mixtures(draw):
    k = draw(st.integers(1, 3))
    ps = draw(st.lists(st.fractions(0, 1, max_denominator=6), min_size=k, max_size=k, unique=True))
    ws = draw(st.lists(st.integers(1, 4), min_size=k, max_size=k))
    s = sum(ws)
    return [(p, F(w, s)) for p, w in zip(ps, ws)]


def as_outer(mix):
    return Measure({Measure({"tt": p, "ff": 1 - p}): w for p, w in mix})


def moment(mix, k):
    return sum(w * p**k for p, w in mix)


def least_moment_gap(a, b, cap):
    return next((k for k in range(cap + 1) if moment(a, k) != moment(b, k)), None)


@settings(max_examples=150, deadline=None)
@given(coin_mixtures(), coin_mixtures())
def test_least_distinguishing_n_is_the_least_differing_moment(a, b):
    ra, rb = as_outer(a), as_outer(b)
    cap = len(a) + len(b)
    rep = distinguish(dist, ra, rb, BOOL, cap)
    assert rep.n == least_moment_gap(a, b, cap)
    assert (ra != rb) == rep.distinguished


@settings(max_examples=60, deadline=None)
@given(coin_mixtures(), st.integers(0, 3))
def test_observations_are_exchangeable_and_consistent(mix, n):
    rho = as_outer(mix)
    assert permutation_failure(dist, rho, BOOL, n) is None
    assert marginal_failure(dist, rho, BOOL, n) is None
    obs = observe_n(dist, rho, BOOL, n)
    # probability of all-heads is the n-th moment
    assert obs[("tt",) * n] == moment(mix, n)


def test_skewed_pair_needs_three_observations():
    a = [(F(0), F(1, 2)), (F(1, 2), F(1, 2))]
    b = [(F(1, 8), F(4, 5)), (F(3, 4), F(1, 5))]
    assert [moment(a, k) == moment(b, k) for k in range(4)] == [True, True, True, False]
    assert distinguish(dist, as_outer(a), as_outer(b), BOOL, 4).n == 3


def test_symmetric_pair_needs_four_observations():
    a = [(F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))]
    b = [(F(0), F(1, 8)), (F(1, 2), F(3, 4)), (F(1), F(1, 8))]
    assert distinguish(dist, as_outer(a), as_outer(b), BOOL, 3).n is None
    assert distinguish(dist, as_outer(a), as_outer(b), BOOL, 5).n == 4


def hoare_observe_oracle(R, X, n):
    # repeated runs of one chosen closed set: the closure of the union of its n-th powers
    out = set()
    for C in R:
        out |= set(itertools.product(C, repeat=n))
    return frozenset(out)


@pytest.mark.parametrize("X", all_topologies("ab") + all_topologies("abc", up_to_homeomorphism=True))
def test_hoare_observation_matches_oracle_and_is_injective(X):
    HX = hoare.T(X)
    for R in hoare.iter_elements(HX):
        for n in range(1, 4):
            assert observe_n(hoare, R, X, n) == hoare_observe_oracle(R, X, n)
    rec = brute_observationality(X, hoare, 3)
    assert rec.ok and rec.details["least_n"] <= 3


def test_maybe_needs_one_observation():
    for X in (BOOL, FinSpace.plain("abc")):
        rec = brute_observationality(X, maybe, 1)
        assert rec.ok and rec.details["least_n"] <= 1



def test_maybe_marginals_break_where_the_inner_run_fails():
    # zero observations never run the inner computation; one observation does
    rho = Just(NOTHING)
    assert observe_n(maybe, rho, BOOL, 0) == Just(())
    assert observe_n(maybe, rho, BOOL, 1) is NOTHING
    assert marginal_failure(maybe, rho, BOOL, 1) == 0
    assert marginal_failure(maybe, Just(Just("tt")), BOOL, 3) is None


def test_reader_is_not_observational():
    rec = brute_observationality(BOOL, reader, 3)
    assert not rec.ok


def test_sampled_mode_labels_itself():
    rec = sampled_observationality(dist, [BOOL, FinSpace.plain("abc")], pairs=300, seed=2)
    assert rec.ok and "no counterexample" in rec.details["mode"]


def test_monoid_route_agrees_with_observations():
    rho = as_outer([(F(1, 3), F(1, 2)), (F(1), F(1, 2))])
    h = lambda x: 1 if x == "tt" else 0
    assert monoid_test(dist, rho, [h, h], BOOL, cross_check=True) == moment([(F(1, 3), F(1, 2)), (F(1), F(1, 2))], 2)
    S = FinSpace.topological([0, 1], [[1]])
    R = frozenset([frozenset([0]), frozenset([0, 1])])
    assert monoid_test(hoare, R, [lambda x: x == 1], S, cross_check=True) == 1


def test_definetti_report_for_distinct_outers():
    X = FinSpace.discrete("ab", "meas")
    fair = Measure({Measure({frozenset("a"): F(1, 2), frozenset("b"): F(1, 2)}): 1})
    mix = Measure({Measure({frozenset("a"): 1}): F(1, 2), Measure({frozenset("b"): 1}): F(1, 2)})
    recs = definetti_demo(giry, fair, mix, X, 4)
    assert all(r.ok for r in recs)
    sep = [r for r in recs if ":separated" in r.check][0]
    assert sep.details["verdict"] == "distinguished-at-2"
