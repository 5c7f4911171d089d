import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from effects_lab.namegen import (
    BUILTIN_STAGED,
    ConstObject,
    Name,
    NameClass,
    NamesObject,
    ProdStaged,
    SumStaged,
    TObject,
    TruncationError,
    cospan_equivalent,
    names_table,
    ng_law_suite,
    ng_observationality_experiment,
    ng_observe_n,
    ng_observe_n_composite,
    ng_sober_check,
    nominal_check,
    positive_object,
    t1_check,
)

K = 7
N = NamesObject(K)
PAIRS = ProdStaged((N, N))
MIXED = ProdStaged((SumStaged(N, ConstObject(["u"], bound=K)), N))
OBJECTS = {"pairs": PAIRS, "mixed": MIXED, "table": ProdStaged((names_table(K), names_table(K)))}


@st.composite
def raw_triples(draw, X):
    a = draw(st.integers(0, 2))
    b1, b2 = draw(st.integers(0, 2)), draw(st.integers(0, 2))
    vs1, vs2 = X.values(a + b1), X.values(a + b2)
    assume(vs1 and vs2)
    v1, v2 = draw(st.sampled_from(vs1)), draw(st.sampled_from(vs2))
    return a, b1, v1, b2, v2


@pytest.mark.parametrize("name", sorted(OBJECTS))
def test_normal_forms_agree_with_cospan_search(name):
    X = OBJECTS[name]
    TX = TObject(X, K)

    @settings(max_examples=150, deadline=None)
    @given(raw_triples(X))
    def check(t):
        a, b1, v1, b2, v2 = t
        same = TX.normalize(a, b1, v1) == TX.normalize(a, b2, v2)
        assert same == cospan_equivalent(X, a, b1, v1, b2, v2, K)

    check()


@pytest.mark.parametrize("name", sorted(OBJECTS))
def test_normalization_is_idempotent_and_alpha_invariant(name):
    X = OBJECTS[name]
    TX = TObject(X, K)
    for a in range(3):
        for b in range(3):
            for v in X.values(a + b):
                c = TX.normalize(a, b, v)
                assert TX.normalize(c.stage, c.block, c.value) == c
                assert c.block <= b
                # renaming the fresh block by a permutation gives the same class
                for perm in itertools.permutations(range(b)):
                    mapping = {**{i: i for i in range(a)}, **{a + j: a + p for j, p in enumerate(perm)}}
                    assert TX.normalize(a, b, X.rename(v, mapping, a + b, a + b)) == c
                # an extra unused fresh name is dropped
                assert TX.normalize(a, b + 1, v) == c


def test_fast_search_matches_brute_search():
    for X in (positive_object(5), names_table(5), ProdStaged((names_table(5), positive_object(5)))):
        TX = TObject(X, 5)
        for a in range(3):
            for b in range(3):
                for v in X.values(a + b):
                    if X.syntactic:
                        assert TX._normalize_syntactic(a, b, v) == TX._normalize_brute(a, b, v)


def test_class_counts():
    # names at stage m: each old name, plus one fresh name if there is room
    TN = TObject(NamesObject(5), 5)
    assert [len(TN.values(m)) for m in range(6)] == [1, 2, 3, 4, 5, 5]
    # pairs of names at stage m: old/old, old/fresh both ways, and two fresh names equal or not
    TP = TObject(ProdStaged((NamesObject(6), NamesObject(6))), 6)
    assert [len(TP.values(m)) for m in range(4)] == [m * m + 2 * m + 2 for m in range(4)]


def test_truncation_only_applies_to_normal_forms():
    TN = TObject(NamesObject(3), 3)
    # five raw fresh names but only one used
    assert TN.normalize(2, 3, Name(4)) == NameClass(2, 1, Name(2))
    with pytest.raises(TruncationError):
        TObject(PAIRS, 2).normalize(1, 2, (Name(1), Name(2)))


def test_t1_has_one_class_per_stage():
    rec = t1_check(5)
    assert rec.ok and set(rec.details["classes_per_stage"].values()) == {1}


@pytest.mark.parametrize("name", ["names", "names2", "bool", "names+1"])
def test_law_suite(name):
    X = BUILTIN_STAGED[name](4)
    recs = ng_law_suite(X, 4, budget=40)
    bad = [r for r in recs if not r.ok]
    assert not bad, bad[0]
    assert {r.check.split(":")[1].split("[")[0] for r in recs} >= {"left-unit", "right-unit", "associativity", "commutativity"}


def test_observe_matches_composite():
    TTX = TObject(TObject(PAIRS, 6), 6)
    for a in range(2):
        for rho in TTX.values(a):
            for n in range(3):
                try:
                    direct = ng_observe_n(TTX, a, rho, n)
                except TruncationError:
                    continue
                assert direct == ng_observe_n_composite(TTX, a, rho, n)


def test_shared_and_independent_names_separate_at_two():
    TTN = TObject(TObject(NamesObject(5), 5), 5)
    shared = TTN.normalize(0, 1, NameClass(1, 0, Name(0)))
    independent = NameClass(0, 0, NameClass(0, 1, Name(0)))
    assert ng_observe_n(TTN, 0, shared, 1) == ng_observe_n(TTN, 0, independent, 1)
    two_s = ng_observe_n(TTN, 0, shared, 2)
    two_i = ng_observe_n(TTN, 0, independent, 2)
    assert two_s == NameClass(0, 1, (Name(0), Name(0)))
    assert two_i == NameClass(0, 2, (Name(0), Name(1)))


def test_observationality_experiment_on_names():
    rec = ng_observationality_experiment(NamesObject(5), 5, stages=(0, 1, 2))
    assert rec.ok and rec.details["distinguished"] == rec.details["pairs"] > 0


def test_nominal_and_sober():
    for X in (NamesObject(4), PAIRS, names_table(4)):
        assert nominal_check(X, 3)[0]
        assert ng_sober_check(X, 4)[0]
    pos = positive_object(4)
    assert not nominal_check(pos, 3)[0]
    ok, why = ng_sober_check(pos, 4)
    assert not ok and "+" in why
