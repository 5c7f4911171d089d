from .base import KleisliMorphism, Monad, ProdObj, TObj, eta_morphism, kleisli_compose, prod, pure
from .finite import NOTHING, Just, Maybe, Reader, ReaderVal, maybe, reader
from .hoare import Hoare, hoare, lower_vietoris_space
from .measure import Measure, MeasureMonad, dist, giry, subgiry

MONADS = {m.name: m for m in (giry, subgiry, dist, maybe, reader, hoare)}

ALIASES = {
    "P": "giry",
    "M": "subgiry",
    "distribution": "dist",
    "H": "hoare",
    "lower-vietoris": "hoare",
}


def get_monad(name: str) -> Monad:
    key = ALIASES.get(name, name)
    try:
        return MONADS[key]
    except KeyError:
        raise KeyError(f"unknown monad {name!r}; expected one of {', '.join(MONADS)}") from None


__all__ = [
    "ALIASES",
    "MONADS",
    "Hoare",
    "Just",
    "KleisliMorphism",
    "Maybe",
    "Measure",
    "MeasureMonad",
    "Monad",
    "NOTHING",
    "ProdObj",
    "Reader",
    "ReaderVal",
    "TObj",
    "dist",
    "eta_morphism",
    "get_monad",
    "giry",
    "hoare",
    "kleisli_compose",
    "lower_vietoris_space",
    "maybe",
    "prod",
    "pure",
    "reader",
    "subgiry",
]
