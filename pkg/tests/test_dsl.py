import warnings
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from effects_lab.core import FinSpace
from effects_lab.dsl import (
    Base,
    DslSyntaxError,
    DslTypeError,
    DuplicateBinderWarning,
    ProdT,
    ThunkT,
    UnitT,
    denote,
    observe_program,
    parse,
    parse_type,
    run_context_n,
    show,
    subst,
    typecheck,
)
from effects_lab.dsl.syntax import Flip, Force, Fst, Let, Lit, Pair, Return, Snd, Thunk, UnitV, Var, free_vars
from effects_lab.monads import NOTHING, Just, Measure, ReaderVal
from effects_lab.namegen import Name, NameClass

SPACES = {
    "bool": FinSpace.plain(["ff", "tt"], name="bool"),
    "three": FinSpace.plain("abc", name="three"),
    "sierpinski": FinSpace.topological(["0", "1"], [["1"]], name="sierpinski"),
}


def den(src, monad="dist"):
    return denote(parse(src), monad, SPACES)(())


# ---------------------------------------------------------------------------
# syntax


@pytest.mark.parametrize(
    "src,line,col",
    [
        ("let x = tt", 1, 11),
        ("(tt,\n  ff", 2, 5),
        ("flip 3/2", 1, 1),
        ("thunk { tt ", 1, 12),
        ("sample { a: 1/0 }", 1, 15),
        ("tt ? ff", 1, 4),
    ],
)
def test_syntax_errors_carry_positions(src, line, col):
    with pytest.raises(DslSyntaxError) as err:
        parse(src)
    assert (err.value.line, err.value.col) == (line, col)


def test_shadowing_warns():
    with pytest.warns(DuplicateBinderWarning):
        parse("let x = tt in let x = ff in x")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse("let x = tt in let y = ff in (x, y)")


def test_let_body_extends_right_and_prefix_binds_tight():
    t = parse("let x = tt in (x, x)")
    assert isinstance(t, Let) and isinstance(t.body, Pair)
    assert parse("force thunk { tt }") == Force((0, 0), Thunk((0, 0), Lit((0, 0), "tt")))
    assert isinstance(parse("fst (tt, ff)"), Fst)


@st.composite
def terms(draw, depth=3, scope=()):
    leaves = [st.sampled_from(["tt", "ff"]).map(lambda l: Lit((0, 0), l)), st.just(UnitV((0, 0)))]
    leaves.append(st.fractions(0, 1, max_denominator=4).map(lambda q: Flip((0, 0), q)))
    if scope:
        leaves.append(st.sampled_from(scope).map(lambda v: Var((0, 0), v)))
    if depth == 0:
        return draw(st.one_of(leaves))
    kind = draw(st.sampled_from(["leaf", "pair", "fst", "snd", "let", "thunk", "force", "return"]))
    sub = lambda s=scope: terms(depth - 1, s)
    p = (0, 0)
    if kind == "leaf":
        return draw(st.one_of(leaves))
    if kind == "pair":
        return Pair(p, draw(sub()), draw(sub()))
    if kind in ("fst", "snd", "force", "return"):
        cls = {"fst": Fst, "snd": Snd, "force": Force, "return": Return}[kind]
        return cls(p, draw(sub()))
    if kind == "thunk":
        return Thunk(p, draw(sub()))
    x = draw(st.sampled_from([v for v in ("x", "y", "z") if v not in scope] or ["w"]))
    return Let(p, x, draw(sub()), draw(sub(scope + (x,))))


@settings(max_examples=200, deadline=None)
@given(terms())
def test_show_parses_back(t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DuplicateBinderWarning)
        assert parse(show(t)) == t


def test_substitution_avoids_capture():
    t = parse("let y = flip 1/2 in (x, y)", scope=("x",))
    s = subst(t, "x", Var((0, 0), "y"))
    assert free_vars(s) == {"y"}
    assert s.var != "y"


# ---------------------------------------------------------------------------
# typing


def test_types():
    assert typecheck(parse("(tt, ())"), None, "dist", SPACES) == ProdT(Base("bool"), UnitT())
    assert typecheck(parse("thunk { flip 1/3 }"), None, "dist", SPACES) == ThunkT(Base("bool"))
    assert typecheck(parse("fail"), None, "maybe", SPACES) == UnitT()
    assert typecheck(parse("(fail, a)"), None, "maybe", SPACES) == ProdT(UnitT(), Base("three"))
    assert parse_type("thunked((bool * unit))") == ThunkT(ProdT(Base("bool"), UnitT()))


@pytest.mark.parametrize(
    "src,monad,needle",
    [
        ("flip 1/2", "hoare", "not available"),
        ("ask", "dist", "not available"),
        ("fresh", "giry", "not available"),
        ("or(tt, a)", "hoare", "mismatch"),
        ("force tt", "dist", "mismatch"),
        ("sample { a: 1/2, b: 1/4 }", "dist", "add up"),
        ("sample { a: 1/2, tt: 1/2 }", "dist", "different spaces"),
        ("nowhere", "dist", "unknown literal"),
        ("1", "dist", "unknown literal"),
    ],
)
def test_type_errors(src, monad, needle):
    with pytest.raises(DslTypeError) as err:
        typecheck(parse(src), None, monad, SPACES)
    assert needle in str(err.value)


def test_subprobability_weights_may_fall_short():
    typecheck(parse("sample { a: 1/2 }"), None, "subgiry", SPACES)


def test_structured_spaces_only_under_their_own_kind():
    assert typecheck(parse("or(0, 1)"), None, "hoare", SPACES) == Base("sierpinski")
    with pytest.raises(DslTypeError):
        typecheck(parse("sample { 0: 1 }"), None, "dist", SPACES)


# ---------------------------------------------------------------------------
# semantics


def test_copy_versus_independent_draws():
    half = F(1, 2)
    assert den("let x = flip 1/2 in (x, x)") == Measure({("ff", "ff"): half, ("tt", "tt"): half})
    assert den("(flip 1/2, flip 1/2)") == Measure({(a, b): F(1, 4) for a in ("ff", "tt") for b in ("ff", "tt")})
    assert den("fst (flip 1/3, flip 1/2)") == Measure({"tt": F(1, 3), "ff": F(2, 3)})


def test_other_monads():
    assert den("let x = fail in tt", "maybe") is NOTHING
    assert den("(tt, a)", "maybe") == Just(("tt", "a"))
    assert den("(ask, ask)", "reader") == ReaderVal(("ff", "ff"), ("tt", "tt"))
    assert den("or(0, 1)", "hoare") == frozenset({"0", "1"})
    assert den("or(tt, ff)", "hoare") == frozenset({"tt", "ff"})
    assert den("fail", "subgiry") == Measure()


CLOSED = [
    "flip 1/3",
    "(flip 1/2, tt)",
    "let u = flip 1/4 in (u, flip 1/2)",
    "fst (flip 1/2, flip 1/3)",
    "force thunk { flip 2/3 }",
]


@pytest.mark.parametrize("m", CLOSED)
def test_let_laws(m):
    # return then bind; bind then return; reassociation
    assert den(f"let x = tt in ({m}, x)") == den(f"({m}, tt)")
    assert den(f"let x = {m} in x") == den(m)
    lhs = den(f"let x = (let y = {m} in (y, y)) in (x, flip 1/2)")
    rhs = den(f"let y = {m} in let x = (y, y) in (x, flip 1/2)")
    assert lhs == rhs


@settings(max_examples=120, deadline=None)
@given(terms(depth=3, scope=("x",)), st.sampled_from(["tt", "ff"]))
def test_substitution_lemma(t, v):
    ctx = {"x": Base("bool")}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DuplicateBinderWarning)
            typecheck(t, ctx, "dist", SPACES)
    except DslTypeError:
        assume(False)
    open_den = denote(t, "dist", SPACES, ctx=ctx)
    closed = denote(subst(t, "x", Lit((0, 0), v)), "dist", SPACES)
    assert open_den((v,)) == closed(())


@pytest.mark.parametrize(
    "src,monad",
    [
        ("thunk { or(tt, ff) }", "hoare"),
        ("or(thunk { tt }, thunk { ff })", "hoare"),
        ("thunk { flip 1/3 }", "giry"),
        ("let x = flip 1/2 in thunk { return x }", "dist"),
        ("thunk { sample { a: 1/2, c: 1/4 } }", "subgiry"),
        ("thunk { let u = fail in tt }", "maybe"),
        ("thunk { ask }", "reader"),
        ("let x = ask in thunk { x }", "reader"),
        ("thunk { fresh }", "namegen"),
        ("let n = fresh in thunk { (n, fresh) }", "namegen"),
    ],
)
def test_testing_contexts_agree_with_observe(src, monad):
    M = parse(src)
    for n in range(4):
        assert run_context_n(M, n, monad, SPACES) == observe_program(M, n, monad, SPACES)


def test_choose_once_versus_every_run():
    every = parse("thunk { or(tt, ff) }")
    once = parse("or(thunk { tt }, thunk { ff })")
    c1 = [run_context_n(m, 1, "hoare", SPACES) for m in (every, once)]
    c2 = [run_context_n(m, 2, "hoare", SPACES) for m in (every, once)]
    assert c1[0] == c1[1]
    assert len(c2[0]) == 4 and c2[1] == frozenset({("ff", "ff"), ("tt", "tt")})


def test_names_in_programs():
    shared = run_context_n(parse("let n = fresh in thunk { n }"), 2, "namegen", SPACES)
    fresh = run_context_n(parse("thunk { fresh }"), 2, "namegen", SPACES)
    assert shared == NameClass(0, 1, (Name(0), Name(0)))
    assert fresh == NameClass(0, 2, (Name(0), Name(1)))
