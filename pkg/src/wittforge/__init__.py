"""wittforge: exact p-typical Witt vector arithmetic, log de Rham-Witt
normal forms over truncated polynomial rings, and the associated basis
and filtration combinatorics, all over exact integer arithmetic."""

__version__ = "0.1.0"

from .algebra import (
    NonDivisibleError,
    PolyParseError,
    RingMismatchError,
    RingSpec,
    SparsePoly,
    UnboundVariableError,
    format_poly,
    parse_poly,
)

__all__ = [
    "NonDivisibleError",
    "PolyParseError",
    "RingMismatchError",
    "RingSpec",
    "SparsePoly",
    "UnboundVariableError",
    "format_poly",
    "parse_poly",
    "__version__",
]
