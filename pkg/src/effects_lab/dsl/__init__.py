from .semantics import (
    MonadRuntime,
    NamegenRuntime,
    StagedDenotation,
    context_term,
    denote,
    fmt_element,
    observe_program,
    program_type,
    run_context_n,
)
from .syntax import DslSyntaxError, DuplicateBinderWarning, Term, is_value, parse, show, subst, tokenize
from .types import Base, DslTypeError, ProdT, ThunkT, Type, UnitT, fmt_type, parse_type, typecheck, typecheck_full

__all__ = [
    "Base",
    "DslSyntaxError",
    "DslTypeError",
    "DuplicateBinderWarning",
    "MonadRuntime",
    "NamegenRuntime",
    "ProdT",
    "StagedDenotation",
    "Term",
    "ThunkT",
    "Type",
    "UnitT",
    "context_term",
    "denote",
    "fmt_element",
    "fmt_type",
    "is_value",
    "observe_program",
    "parse",
    "parse_type",
    "program_type",
    "run_context_n",
    "show",
    "subst",
    "tokenize",
    "typecheck",
    "typecheck_full",
]
