import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effects_lab.core import MEAS, BaseMap, FinSpace, all_algebras, all_topologies, compose, is_iso, is_t0, kolmogorov_quotient
from effects_lab.kleisli import all_kernels, is_thunkable
from effects_lab.monads import Just, Measure, ReaderVal, giry, hoare, maybe, reader, subgiry
from effects_lab.monads.base import kleisli_compose
from effects_lab.sobrify import (
    d_on_morphism,
    fork_holds,
    fork_solutions_brute,
    idempotence_check,
    irreducible_closed_sets,
    is_sober,
    kolmogorov_closures,
    sobrify,
    unit_fork_check,
    zero_measure_note,
)

TOPS = all_topologies("abc") + all_topologies("abcd", up_to_homeomorphism=True)
ALGS = list(all_algebras("abc")) + list(all_algebras("abcd"))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(TOPS))
def test_hoare_fork_solutions_are_point_closures(X):
    S = sobrify(X, hoare)
    brute, exhaustive = fork_solutions_brute(X, hoare)
    assert exhaustive
    assert set(S.DX.points) == set(brute) == set(irreducible_closed_sets(X)) == set(kolmogorov_closures(X))
    Q, _ = kolmogorov_quotient(X)
    assert is_iso(BaseMap(Q, S.DX, {c: X.down(next(iter(c))) for c in Q.points}))
    # a finite space is sober exactly when it is T0
    assert is_sober(X, hoare) == is_t0(X)
    assert all(r.ok for r in idempotence_check(X, hoare))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALGS))
def test_giry_fork_solutions_are_atoms(X):
    S = sobrify(X, giry)
    assert set(S.DX.points) == {Measure({a: 1}) for a in X.atoms}
    sampled, _ = fork_solutions_brute(X, giry, budget=150)
    assert all(len(p.items) == 1 for p in sampled)
    assert all(r.ok for r in unit_fork_check(X, giry, budget=60))
    assert all(r.ok for r in idempotence_check(X, giry, pairs=300))


def test_codiscrete_collapses_to_one_point():
    C = FinSpace.codiscrete("ab", MEAS)
    S = sobrify(C, giry)
    assert len(S.DX.points) == 1
    assert not is_sober(C, giry)
    assert is_sober(S.DX, giry)


def test_a_proper_mixture_is_not_a_fork_solution():
    X = FinSpace.discrete("ab", MEAS)
    half = Measure({frozenset("a"): 0.5, frozenset("b"): 0.5})
    assert not fork_holds(giry, X, half)


def test_zero_subprobability_fails_the_fork():
    # eta puts full mass on the zero measure, while pushing the zero measure forward stays zero
    X = FinSpace.discrete("ab", MEAS)
    assert not fork_holds(subgiry, X, Measure())
    assert zero_measure_note(X, subgiry).details["in_fork"] is False
    assert Measure() not in sobrify(X, subgiry).DX.points
    assert zero_measure_note(X, giry) is None


def test_maybe_and_reader_solutions():
    X = FinSpace.plain("ab")
    assert set(sobrify(X, maybe).DX.points) == {Just("a"), Just("b")}
    assert set(sobrify(X, reader).DX.points) == {ReaderVal("a", "a"), ReaderVal("b", "b")}
    brute, ex = fork_solutions_brute(X, reader)
    assert ex and set(brute) == {ReaderVal("a", "a"), ReaderVal("b", "b")}
    assert is_sober(X, maybe) and is_sober(X, reader)


def test_d_is_functorial_on_thunkable_kernels():
    X = FinSpace.topological("abc", [["a"], ["a", "b"]])
    Y = FinSpace.codiscrete("uv", "top")
    ks = [k for k in all_kernels(hoare, X, Y) if is_thunkable(k)]
    gs = [g for g in all_kernels(hoare, Y, X) if is_thunkable(g)]
    assert ks and gs
    rng = random.Random(3)
    for _ in range(20):
        f, g = rng.choice(ks), rng.choice(gs)
        lhs = d_on_morphism(kleisli_compose(g, f))
        rhs = compose(d_on_morphism(f), d_on_morphism(g))
        assert lhs == rhs
