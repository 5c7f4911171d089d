"""``effects-lab``: run checks over a corpus and print a report.

Exit status is 0 when every record passes, 1 when a check fails (the first
failing record goes to stderr) and 2 for usage or corpus errors.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import checks
from .core import StructureError
from .corpus import CorpusError, default_corpus_path, load_corpus
from .dsl import DslSyntaxError, DslTypeError
from .monads import MONADS
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--corpus", default=None, help="corpus file (default: the shipped corpus)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default: corpus config, else 0)")
    p.add_argument("--nmax", type=int, default=None, help="largest number of observations (default 4)")
    p.add_argument("--stage-bound", type=int, default=None, help="name-generation stage bound (default 5)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timing", action="store_true", help="append wall-clock time to the report")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="effects-lab", description="Finite checks for commutative effect monads.")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, help):
        return sub.add_parser(name, parents=[common], help=help, description=help)

    p = verb("laws", "monad, pairing, copy/discard, thunk/force laws and the inclusion chain")
    p.add_argument("--monad", action="append", choices=sorted(MONADS), help="restrict to a monad (repeatable)")

    p = verb("chain", "pure => thunkable => deterministic on random and exhaustive kernels")
    p.add_argument("--monad", action="append", choices=sorted(MONADS))
    p.add_argument("--kernels", type=int, default=1000, help="random kernels per monad")

    p = verb("classify", "classify corpus kernels")
    p.add_argument("kernels", nargs="*", help="kernel names (default: all)")

    p = verb("classify-prog", "classify the morphism a corpus program denotes")
    p.add_argument("program")

    p = verb("sobrify", "the space of fork solutions of a corpus space")
    p.add_argument("--space", required=True)
    p.add_argument("--monad", required=True, choices=sorted(MONADS))
    p.add_argument("--check", choices=("idempotence",), action="append", default=[])

    p = verb("sober-sweep", "fork solutions on every small topology and algebra")
    p.add_argument("--max-points", type=int, default=4)
    p.add_argument("--pairs", type=int, default=2000)

    p = verb("observational", "exhaustive and sampled observationality checks")
    p.add_argument("--pairs", type=int, default=10000)

    p = verb("equiv", "compare two outer elements (or two programs) by repeated observation")
    p.add_argument("first")
    p.add_argument("second")

    p = verb("equiv-prog", "compare two thunked programs through testing contexts")
    p.add_argument("first")
    p.add_argument("second")

    p = verb("thunkdet", "deterministic kernels are thunkable for observational monads")
    p.add_argument("--kernels", type=int, default=1000)

    verb("definetti", "exchangeability, marginals and separation of corpus outers")

    p = verb("namegen", "bounded name-generation monad: laws, observation experiment, nominal checks")
    p.add_argument("objects", nargs="*", help="staged objects (default: built-ins and corpus)")

    p = verb("demo", "built-in demonstrations")
    p.add_argument("name", choices=sorted(checks.DEMOS))
    return parser


def _settings(args, corpus) -> tuple[int, int, int]:
    cfg = corpus.config if corpus is not None else {}
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    nmax = args.nmax if args.nmax is not None else int(cfg.get("nmax", 4))
    bound = args.stage_bound if args.stage_bound is not None else int(cfg.get("stage-bound", 5))
    if nmax < 0 or bound < 0:
        raise UsageError("--nmax and --stage-bound must be non-negative")
    return seed, nmax, bound


def run(args) -> Report:
    corpus = load_corpus(args.corpus or default_corpus_path())
    seed, nmax, bound = _settings(args, corpus)
    match args.verb:
        case "laws":
            return checks.cmd_laws(corpus, seed, args.monad)
        case "chain":
            return checks.cmd_chain(corpus, args.kernels, seed, args.monad)
        case "classify":
            return checks.cmd_classify(corpus, args.kernels)
        case "classify-prog":
            return checks.cmd_classify_prog(corpus, args.program)
        case "sobrify":
            return checks.cmd_sobrify(corpus, args.space, args.monad, "idempotence" in args.check, seed)
        case "sober-sweep":
            return checks.cmd_sober_sweep(args.max_points, seed, args.pairs)
        case "observational":
            return checks.cmd_observational(corpus, seed, args.pairs)
        case "equiv":
            return checks.cmd_equiv(corpus, args.first, args.second, nmax, seed)
        case "equiv-prog":
            return checks.cmd_equiv_prog(corpus, args.first, args.second, nmax, seed, bound)
        case "thunkdet":
            return checks.cmd_thunkdet(corpus, args.kernels, seed)
        case "definetti":
            return checks.cmd_definetti(corpus, nmax)
        case "namegen":
            return checks.cmd_namegen(corpus, bound, args.objects or None, seed)
        case "demo":
            return checks.cmd_demo(args.name, corpus, nmax, bound)
    raise UsageError(f"unknown verb {args.verb!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        report = run(args)
    except (UsageError, CorpusError, DslSyntaxError, DslTypeError, StructureError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"effects-lab: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    report.elapsed = time.perf_counter() - start
    out = report.to_json(args.timing) if args.format == "json" else report.to_text(args.timing)
    print(out)
    if not report.ok:
        first = report.failures[0]
        print(f"effects-lab: first failure: {first.check}: {first.witness}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
