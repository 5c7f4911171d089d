from fractions import Fraction

import pytest

from effects_lab.corpus import CorpusError, load_corpus, parse_corpus
from effects_lab.monads import Measure


def test_shipped_corpus(corpus):
    assert {"bool", "sierpinski", "codiscrete2", "split3"} <= set(corpus.spaces)
    assert corpus.config == {"nmax": 4, "seed": 0, "stage-bound": 5}
    assert corpus.kernel("coin").monad.name == "dist"
    assert corpus.program("m1-hoare").monad == "hoare"
    assert corpus.outer("fair-mix").value == Measure({Measure({"tt": 1}): Fraction(1, 2), Measure({"ff": 1}): Fraction(1, 2)})
    assert set(corpus.staged) == {"positive", "name-pairs"}


def test_kernel_rows_are_read(corpus):
    k = corpus.kernel("biased")
    assert k("ff") == Measure({"ff": 1})
    assert k("tt") == Measure({"tt": Fraction(2, 3), "ff": Fraction(1, 3)})


@pytest.mark.parametrize(
    "src,line,col,needle",
    [
        ("space s { kind = set; points = [a, b] }\nkernel k : s -> s @ dist { a -> { a: 1/2 } }", 2, 33, "not an element"),
        ("space s { kind = set; points = [a, b] }\nspace t { kind = set; points = [a, c] }\nprogram p @ dist { thunk { a } }", 3, 28, "ambiguous"),
        ("kernel k : nope -> nope @ dist { }", 1, 12, "unknown space"),
        ("space s { kind = blob; points = [a] }", 1, 11, "unknown kind"),
        ("space s { kind = top; points = [a, b]; generators = [[c]] }", 1, 40, "unknown points"),
        ("space s { kind = set; points = [a] }\nspace s { kind = set; points = [b] }", 2, 1, "defined twice"),
        ("program p @ hoare { thunk { flip 1/2 } }", 1, 29, "not available"),
        ("space s { kind = set; points = [a, b] }\nkernel k : s -> s @ dist { a -> a }", 2, 1, "no row for b"),
        ("space s { kind = set; points = [a] } %", 1, 38, "unexpected character"),
    ],
)
def test_errors_are_positioned(src, line, col, needle):
    with pytest.raises(CorpusError) as err:
        parse_corpus(src)
    e = err.value
    assert (e.line, e.col) == (line, col)
    assert needle in e.message
    assert str(e).startswith(f"<corpus>:{line}:{col}: ")


def test_kernels_must_respect_structure():
    head = "space s { kind = meas; points = [x, y, z]; generators = [[x]] }\n"
    # y and z share an atom, so they may not be sent to different atoms
    with pytest.raises(CorpusError, match="not structure preserving"):
        parse_corpus(head + "kernel k : s -> s @ giry { x -> x; y -> x; z -> y }")
    parse_corpus(head + "kernel k : s -> s @ giry { x -> x; y -> y; z -> z }")


def test_include(tmp_path):
    (tmp_path / "base.lab").write_text("space s { kind = set; points = [a, b] }\n")
    (tmp_path / "main.lab").write_text('include "base.lab"\nkernel k : s -> s @ dist { a -> b; b -> a }\n')
    c = load_corpus(tmp_path / "main.lab")
    assert c.kernel("k")("a") == Measure({"b": 1})
    assert len(c.sources) == 2


def test_include_cycle(tmp_path):
    (tmp_path / "a.lab").write_text('include "b.lab"\n')
    (tmp_path / "b.lab").write_text('include "a.lab"\n')
    with pytest.raises(CorpusError, match="include cycle"):
        load_corpus(tmp_path / "a.lab")


def test_missing_include(tmp_path):
    (tmp_path / "a.lab").write_text('include "gone.lab"\n')
    with pytest.raises(CorpusError, match="not found"):
        load_corpus(tmp_path / "a.lab")


def test_unknown_lookup(corpus):
    with pytest.raises(CorpusError, match="unknown kernel"):
        corpus.kernel("nope")
    with pytest.raises(CorpusError, match="not usable"):
        corpus.space_for("sierpinski", "meas")
