"""Report-producing commands over a corpus.

Every command returns a ``Report`` assembled from library operations; the
command line only parses arguments and prints.  Records come out in a fixed
order (monads in ``MONAD_ORDER``, objects sorted by name).
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from .core import MEAS, SET, BaseMap, FinSpace, StructureError, TooLarge, all_algebras, all_topologies, is_iso, kolmogorov_quotient
from .corpus import Corpus, CorpusError, load_default
from .dsl import denote, fmt_element, observe_program, run_context_n, typecheck_full
from .dsl.types import ThunkT, fmt_type
from .kleisli import (
    all_kernels,
    cd_laws,
    classify,
    inclusion_chain,
    random_kernel,
    thunk_force_axioms,
)
from .monads import Measure, get_monad
from .monads.base import KleisliMorphism, Monad
from .monads.laws import kleisli_laws, law_suite
from .namegen import (
    BUILTIN_STAGED,
    NameClass,
    NamesObject,
    TObject,
    ng_law_suite,
    ng_observationality_experiment,
    ng_observe_n,
    ng_sober_check,
    nominal_check,
    t1_check,
)
from .observe import (
    brute_observationality,
    definetti_demo,
    det_implies_thunkable,
    distinguish,
    observe_n,
    sampled_observationality,
)
from .report import Record, Report, info, record
from .sobrify import (
    fork_holds,
    fork_solutions,
    fork_solutions_brute,
    idempotence_check,
    irreducible_closed_sets,
    kolmogorov_closures,
    sobrify,
    unit_fork_check,
    zero_measure_note,
)

MONAD_ORDER = ("giry", "subgiry", "dist", "maybe", "reader", "hoare")
OBSERVATIONAL = ("giry", "dist", "maybe", "hoare")


def spaces_for(corpus: Corpus, T: Monad, max_points: int | None = 4) -> list[FinSpace]:
    """Corpus spaces usable under ``T`` (plain sets become discrete), sorted by name."""
    out = []
    for name in sorted(corpus.spaces):
        X = corpus.spaces[name]
        if X.kind not in (SET, T.kind):
            continue
        if max_points is not None and len(X.points) > max_points:
            continue
        out.append(X.as_kind(T.kind))
    return out


def _monads(names: Sequence[str] | None) -> list[Monad]:
    return [get_monad(m) for m in (names or MONAD_ORDER)]


# ---------------------------------------------------------------------------
# laws


def cmd_laws(corpus: Corpus, seed: int = 0, monads: Sequence[str] | None = None, budget: int = 300) -> Report:
    """Monad, pairing, Kleisli, copy/discard and thunk/force laws, plus the inclusion chain."""
    rep = Report("laws")
    rng = random.Random(seed)
    for T in _monads(monads):
        spaces = spaces_for(corpus, T)
        rep.extend(law_suite(T, spaces, budget, seed))
        rep.extend(kleisli_laws(T, spaces, budget=120, seed=seed))
        for X in spaces:
            rep.extend(cd_laws(T, X, budget, seed))
            rep.extend(thunk_force_axioms(T, X, budget=120, seed=seed))
        ks = chain_kernels(T, spaces, 60, rng)
        ks += [k for k in corpus.kernels.values() if k.monad.name == T.name]
        rep.add(inclusion_chain(ks, seed, label="[corpus]"))
    return rep


def chain_kernels(T: Monad, spaces: Sequence[FinSpace], n: int, rng: random.Random) -> list[KleisliMorphism]:
    """``n`` random kernels between random pairs of the given spaces."""
    spaces = [X for X in spaces if X.points]
    out = []
    for _ in range(n):
        X, Y = rng.choice(spaces), rng.choice(spaces)
        out.append(random_kernel(T, X, Y, rng))
    return out


def exhaustive_kernels(T: Monad, spaces: Sequence[FinSpace], max_points: int = 3) -> list[KleisliMorphism]:
    """Every kernel between spaces with at most ``max_points`` points (finite monads only)."""
    small = [X for X in spaces if 0 < len(X.points) <= max_points]
    out = []
    for X, Y in itertools.product(small, repeat=2):
        try:
            out.extend(all_kernels(T, X, Y))
        except TooLarge:
            continue
    return out


def cmd_chain(corpus: Corpus, n: int = 1000, seed: int = 0, monads: Sequence[str] | None = None) -> Report:
    """pure => thunkable => deterministic on random kernels and, for finite monads, on every small kernel."""
    rep = Report("inclusion-chain")
    for T in _monads(monads):
        rng = random.Random(f"chain:{seed}:{T.name}")
        spaces = spaces_for(corpus, T)
        rep.add(inclusion_chain(chain_kernels(T, spaces, n, rng), seed, label="[random]"))
        if T.finite:
            rep.add(inclusion_chain(exhaustive_kernels(T, spaces), None, label="[exhaustive]"))
    return rep


# ---------------------------------------------------------------------------
# classification


def classification_record(k: KleisliMorphism, name: str) -> Record:
    c = classify(k, strict=False)
    d = c.to_dict()
    d["uniquely_pure"] = c.uniquely_pure
    d["monad"] = k.monad.name
    d["kernel"] = k.fmt()
    return record(f"classify[{name}]", c.chain_holds(), None if c.chain_holds() else "inclusion chain violated", None, **d)


def cmd_classify(corpus: Corpus, names: Sequence[str] | None = None) -> Report:
    rep = Report("classify")
    for name in names or sorted(corpus.kernels):
        rep.add(classification_record(corpus.kernel(name), name))
    return rep


def cmd_classify_prog(corpus: Corpus, name: str) -> Report:
    p = corpus.program(name)
    if p.monad == "namegen":
        raise CorpusError("classification is not available for namegen programs")
    k = denote(p.term, p.monad, corpus.spaces)
    rep = Report(f"classify-prog {name}")
    rep.add(classification_record(k, name))
    return rep


# ---------------------------------------------------------------------------
# sobrification


def cmd_sobrify(corpus: Corpus, space: str, monad: str, check_idempotence: bool = False, seed: int = 0) -> Report:
    T = get_monad(monad)
    X = corpus.space_for(space, T.kind)
    S = sobrify(X, T)
    rep = Report(f"sobrify {space} @ {monad}")
    shown = S.fmt()
    rep.add(info(f"{T.name}:D[{space}]", None, None, points=len(S.DX.points), **shown))
    rep.extend(unit_fork_check(X, T, seed=seed))
    z = zero_measure_note(X, T)
    if z is not None:
        rep.add(z)
    if check_idempotence:
        rep.extend(idempotence_check(X, T, seed=seed))
    return rep


def _kolmogorov_iso(X: FinSpace, DX: FinSpace) -> bool:
    Q, _ = kolmogorov_quotient(X)
    table = {c: X.down(next(iter(c))) for c in Q.points}
    try:
        return is_iso(BaseMap(Q, DX, table))
    except StructureError:
        return False


def cmd_sober_sweep(max_points: int = 4, seed: int = 0, pairs: int = 2000) -> Report:
    """Fork solutions on every small topology (lower Vietoris) and algebra (Giry), with idempotence."""
    from .monads import giry, hoare

    rep = Report("sobrification sweep")
    labels = "abcdefgh"
    bad_irr = bad_kq = bad_iso = bad_idem = None
    spaces = 0
    for n in range(max_points + 1):
        for i, X in enumerate(all_topologies(labels[:n], up_to_homeomorphism=True)):
            X = X.renamed(f"top{n}.{i}")
            spaces += 1
            S = sobrify(X, hoare)
            sols = set(S.DX.points)
            brute, _ = fork_solutions_brute(X, hoare)
            if bad_irr is None and (sols != set(brute) or sols != set(irreducible_closed_sets(X))):
                bad_irr = X.name
            if bad_kq is None and sols != set(kolmogorov_closures(X)):
                bad_kq = X.name
            if bad_iso is None and not _kolmogorov_iso(X, S.DX):
                bad_iso = X.name
            if bad_idem is None and not all(r.ok for r in idempotence_check(X, hoare, seed=seed)):
                bad_idem = X.name
    rep.add(record("hoare:D-is-irreducible-closed-sets", bad_irr is None, bad_irr, None, topologies=spaces, mode="exhaustive up to homeomorphism"))
    rep.add(record("hoare:D-is-point-closures", bad_kq is None, bad_kq, None, topologies=spaces))
    rep.add(record("hoare:D-iso-kolmogorov-quotient", bad_iso is None, bad_iso, None, topologies=spaces))
    rep.add(record("hoare:D-idempotent", bad_idem is None, bad_idem, seed, topologies=spaces))

    bad_atoms = bad_idem = None
    algebras = 0
    for n in range(1, max_points + 1):
        for i, X in enumerate(all_algebras(labels[:n])):
            X = X.renamed(f"alg{n}.{i}")
            algebras += 1
            S = sobrify(X, giry)
            deltas = {Measure({k: 1}) for k in X.mkeys()}
            atoms_ok = set(S.DX.points) == deltas and len(deltas) == len(X.atoms)
            sampled, _ = fork_solutions_brute(X, giry, budget=200, seed=seed)
            non_delta = [p for p in sampled if len(p.items) != 1]
            if bad_atoms is None and (not atoms_ok or non_delta or not all(fork_holds(giry, X, p) for p in S.DX.points)):
                bad_atoms = X.name
            if bad_idem is None and not all(r.ok for r in idempotence_check(X, giry, pairs=pairs, seed=seed)):
                bad_idem = X.name
    rep.add(record("giry:D-is-atoms", bad_atoms is None, bad_atoms, seed, algebras=algebras, mode="characterization plus sampled fork search"))
    rep.add(record("giry:D-idempotent", bad_idem is None, bad_idem, seed, algebras=algebras, pairs=pairs))
    return rep


# ---------------------------------------------------------------------------
# observationality


def cmd_observational(corpus: Corpus, seed: int = 0, pairs: int = 10000, n_max: int = 3) -> Report:
    from .monads import dist, hoare, maybe

    rep = Report("observationality")
    labels = "abc"
    for n in range(1, 4):
        for i, X in enumerate(all_topologies(labels[:n])):
            rec = brute_observationality(X.renamed(f"top{n}.{i}"), hoare, n_max)
            rep.add(rec)
    for X in spaces_for(corpus, maybe, 3):
        rep.add(brute_observationality(X, maybe, 1))
    rep.add(sampled_observationality(dist, spaces_for(corpus, dist, 4), pairs, seed))
    return rep


def _outer_or_program(corpus: Corpus, name: str):
    if name in corpus.outers:
        o = corpus.outers[name]
        T = get_monad(o.monad)
        return o.monad, o.value, corpus.space_for(o.space, T.kind)
    if name in corpus.programs:
        return None
    raise CorpusError(f"{name!r} is neither an outer element nor a program")


def cmd_equiv(corpus: Corpus, a: str, b: str, n_max: int = 4, seed: int = 0) -> Report:
    """Compare two outer elements (or two programs) by their observations up to ``n_max``."""
    if a in corpus.programs and b in corpus.programs:
        return cmd_equiv_prog(corpus, a, b, n_max, seed)
    oa, ob = _outer_or_program(corpus, a), _outer_or_program(corpus, b)
    if oa is None or ob is None:
        raise CorpusError("compare two outer elements or two programs")
    (ma, ra, Xa), (mb, rb, Xb) = oa, ob
    if ma != mb or Xa != Xb:
        raise CorpusError(f"{a} and {b} live in different places ({ma} over {Xa.name} vs {mb} over {Xb.name})")
    T = get_monad(ma)
    res = distinguish(T, ra, rb, Xa, n_max)
    rep = Report(f"equiv {a} {b}")
    rep.add(_equiv_record(f"equiv[{a},{b}]", res, seed, n_max))
    return rep


def _equiv_record(check: str, res, seed, n_max, **extra) -> Record:
    witness = None
    if res.witness is not None:
        witness = {"n": res.n, "first": res.witness[0], "second": res.witness[1]}
    return info(check, witness, seed, verdict=res.fmt_verdict(), n_max=n_max, **extra)


def cmd_equiv_prog(corpus: Corpus, p: str, q: str, n_max: int = 4, seed: int = 0, bound: int | None = None) -> Report:
    """Observations of two thunked programs through the testing contexts, cross-checked against observe_n."""
    P, Q = corpus.program(p), corpus.program(q)
    if P.monad != Q.monad:
        raise CorpusError(f"{p} runs under {P.monad} but {q} under {Q.monad}")
    bound = bound or corpus.config.get("stage-bound", 5)
    monad = P.monad
    tp = typecheck_full(P.term, None, monad, corpus.spaces).type
    tq = typecheck_full(Q.term, None, monad, corpus.spaces).type
    if tp != tq or not isinstance(tp, ThunkT):
        raise CorpusError(f"programs need the same thunked type, got {fmt_type(tp)} and {fmt_type(tq)}")
    rep = Report(f"equiv-prog {p} {q}")
    found = None
    for n in range(n_max + 1):
        cp = run_context_n(P.term, n, monad, corpus.spaces, bound)
        cq = run_context_n(Q.term, n, monad, corpus.spaces, bound)
        agree = cp == observe_program(P.term, n, monad, corpus.spaces, bound) and cq == observe_program(
            Q.term, n, monad, corpus.spaces, bound
        )
        rep.add(
            record(
                f"context-{n}[{p},{q}]",
                agree,
                None if agree else "context and observe_n disagree",
                seed,
                equal=cp == cq,
                first=fmt_element(monad, cp),
                second=fmt_element(monad, cq),
            )
        )
        if found is None and cp != cq:
            found = n
    verdict = f"distinguished-at-{found}" if found is not None else "equal-up-to-bound"
    rep.add(info(f"equiv[{p},{q}]", None, seed, verdict=verdict, n_max=n_max))
    return rep


def cmd_thunkdet(corpus: Corpus, n: int = 1000, seed: int = 0) -> Report:
    """Deterministic kernels are thunkable for observational monads; the reader monad has exceptions."""
    rep = Report("deterministic-implies-thunkable")
    for name in (*OBSERVATIONAL, "reader"):
        T = get_monad(name)
        rng = random.Random(f"chain:{seed}:{T.name}")
        spaces = spaces_for(corpus, T)
        ks = chain_kernels(T, spaces, n, rng)
        if T.finite:
            ks += exhaustive_kernels(T, spaces)
        ks += [k for k in corpus.kernels.values() if k.monad.name == name]
        rep.add(det_implies_thunkable(T, ks, seed))
        rep.add(info(f"{T.name}:observational-flag", None, None, observational=T.observational))
    return rep


def cmd_definetti(corpus: Corpus, n_max: int = 4) -> Report:
    """Exchangeability and marginal consistency for every corpus outer; separation of bool pairs with equal observe_1."""
    rep = Report("de Finetti truncation")
    for name in sorted(corpus.outers):
        o = corpus.outers[name]
        T = get_monad(o.monad)
        X = corpus.space_for(o.space, T.kind)
        recs = definetti_demo(T, o.value, o.value, X, n_max, name)
        for r in recs:
            if "-second" in r.check or ":separated" in r.check:
                continue
            if not r.ok and ":marginal-consistent" in r.check and not T.affine:
                # dropping a coordinate also drops its effect, which only a discardable outcome survives
                r = info(r.check, r.witness, r.seed, expected="monad is not affine", **r.details)
            rep.add(r)
    for a, b in itertools.combinations(sorted(corpus.outers), 2):
        oa, ob = corpus.outers[a], corpus.outers[b]
        if oa.monad != ob.monad or oa.space != "bool" or ob.space != "bool" or oa.value == ob.value:
            continue
        T = get_monad(oa.monad)
        X = corpus.space_for("bool", T.kind)
        if observe_n(T, oa.value, X, 1) != observe_n(T, ob.value, X, 1):
            continue
        res = distinguish(T, oa.value, ob.value, X, 3)
        rep.add(
            record(
                f"{T.name}:separated-by-2-or-3[{a},{b}]",
                res.distinguished and res.n in (2, 3),
                None if res.witness is None else {"n": res.n, "first": res.witness[0], "second": res.witness[1]},
                None,
                verdict=res.fmt_verdict(),
            )
        )
    return rep


# ---------------------------------------------------------------------------
# name generation


def staged_objects(corpus: Corpus | None, K: int) -> dict:
    out = {name: make(K) for name, make in BUILTIN_STAGED.items()}
    if corpus is not None:
        for name, X in sorted(corpus.staged.items()):
            out[name] = X
    return out


def cmd_namegen(corpus: Corpus | None = None, K: int = 5, objects: Sequence[str] | None = None, seed: int = 0) -> Report:
    rep = Report(f"namegen (stage bound {K})")
    rep.add(t1_check(K))
    objs = staged_objects(corpus, K)
    for name in objects or sorted(objs):
        if name not in objs:
            raise CorpusError(f"unknown staged object {name!r}")
        X = objs[name]
        if X.bound < K:
            rep.add(info(f"namegen:stage-bound[{name}]", None, None, note=f"tables stop at stage {X.bound}", effective_bound=X.bound))
        bound = min(K, X.bound)
        rep.extend(ng_law_suite(X, bound, budget=120, seed=seed))
        rep.add(ng_observationality_experiment(X, bound, stages=(0, 1, 2)))
        nom, why = nominal_check(X, min(3, bound))
        sober, why2 = ng_sober_check(X, bound)
        tx_nom, why3 = nominal_check(TObject(X, bound), min(3, bound))
        rep.add(info(f"namegen:nominal[{name}]", why, None, nominal=nom))
        rep.add(info(f"namegen:sober[{name}]", why2, None, sober=sober))
        rep.add(record(f"namegen:T-nominal[{name}]", tx_nom, why3, None))
        rep.add(record(f"namegen:nominal-implies-sober[{name}]", sober or not nom, None if sober or not nom else why2, None))
    return rep


# ---------------------------------------------------------------------------
# demos


M1M2 = {
    "hoare": ("thunk { or(tt, ff) }", "or(thunk { tt }, thunk { ff })"),
    "giry": ("thunk { flip 1/2 }", "let x = flip 1/2 in thunk { return x }"),
}


def demo_m1m2(corpus: Corpus | None = None, n_max: int = 4) -> Report:
    """Choosing on every run versus choosing once: equal single runs, different pairs of runs."""
    from .dsl import parse

    corpus = corpus or load_default()
    rep = Report("demo m1m2")
    for monad, (s1, s2) in M1M2.items():
        m1, m2 = parse(s1), parse(s2)
        ctx = {}
        for n in range(n_max + 1):
            c1 = run_context_n(m1, n, monad, corpus.spaces)
            c2 = run_context_n(m2, n, monad, corpus.spaces)
            o1 = observe_program(m1, n, monad, corpus.spaces)
            o2 = observe_program(m2, n, monad, corpus.spaces)
            ctx[n] = (c1, c2)
            rep.add(record(f"{monad}:context-agrees-with-observe-{n}", c1 == o1 and c2 == o2, None, None))
        (a1, b1), (a2, b2) = ctx[1], ctx[2]
        rep.add(record(f"{monad}:C1-equal", a1 == b1, {"M1": fmt_element(monad, a1), "M2": fmt_element(monad, b1)}, None))
        rep.add(record(f"{monad}:C2-distinct", a2 != b2, {"M1": fmt_element(monad, a2), "M2": fmt_element(monad, b2)}, None))
        rep.add(info(f"{monad}:programs", None, None, M1=s1, M2=s2))
    return rep


def demo_codiscrete(corpus: Corpus | None = None) -> Report:
    """Finite Giry on a two-point space with the trivial algebra."""
    from .monads import giry

    corpus = corpus or load_default()
    rep = cmd_sobrify(corpus, "codiscrete2", "giry")
    X = corpus.space_for("codiscrete2", MEAS)
    rep.title = "demo codiscrete"
    rep.add(record("giry:D-has-one-point[codiscrete2]", len(sobrify(X, giry).DX.points) == 1, None, None))
    k = corpus.kernel("onto-codiscrete")
    c = classify(k, strict=False)
    rep.add(classification_record(k, "onto-codiscrete"))
    rep.add(
        record(
            "giry:pure-not-uniquely-pure[onto-codiscrete]",
            c.thunkable and len(c.pure) == 2,
            None,
            None,
            witnesses=[g.fmt() for g in c.pure],
        )
    )
    return rep


def demo_definetti(corpus: Corpus | None = None, n_max: int = 4) -> Report:
    corpus = corpus or load_default()
    rep = cmd_definetti(corpus, n_max)
    rep.title = "demo definetti"
    return rep


def demo_namegen(K: int = 5) -> Report:
    """One fresh name reused on every run versus a fresh name per run."""
    rep = Report("demo namegen")
    N = NamesObject(K)
    TTN = TObject(TObject(N, K), K)
    shared = TTN.normalize(0, 1, NameClass(1, 0, _name(0)))
    independent = NameClass(0, 0, NameClass(0, 1, _name(0)))
    obs = {n: (ng_observe_n(TTN, 0, shared, n), ng_observe_n(TTN, 0, independent, n)) for n in range(3)}
    least = next((n for n in range(3) if obs[n][0] != obs[n][1]), None)
    rep.add(
        record(
            "namegen:shared-vs-independent",
            least == 2,
            {str(n): {"shared": a.fmt(), "independent": b.fmt()} for n, (a, b) in obs.items()},
            None,
            shared=shared.fmt(),
            independent=independent.fmt(),
            least_n=least,
        )
    )
    rep.add(ng_observationality_experiment(N, K, stages=(0, 1, 2)))
    return rep


def _name(i: int):
    from .namegen import Name

    return Name(i)


DEMOS = {
    "m1m2": demo_m1m2,
    "codiscrete": demo_codiscrete,
    "definetti": demo_definetti,
    "namegen": demo_namegen,
}


def cmd_demo(name: str, corpus: Corpus | None = None, n_max: int = 4, K: int = 5) -> Report:
    if name not in DEMOS:
        raise CorpusError(f"unknown demo {name!r} (choose from {', '.join(DEMOS)})")
    if name == "namegen":
        return demo_namegen(K)
    if name == "codiscrete":
        return demo_codiscrete(corpus)
    return DEMOS[name](corpus, n_max)
