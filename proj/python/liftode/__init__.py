"""Linear ODEs satisfied by powers of solutions of y'' = p y' + q y."""

from ._liftode import (
    ConfigError,
    DomainError,
    FixtureFormatError,
    ParseError,
    check_fixture,
    coefficients,
    derivative,
    derive,
    eval_expr,
    normalize,
    verify,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "FixtureFormatError",
    "ParseError",
    "check_fixture",
    "coefficients",
    "derivative",
    "derive",
    "eval_expr",
    "normalize",
    "verify",
]
