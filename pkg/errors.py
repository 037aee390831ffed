"""
Exception hierarchy for the heralded GKP toolkit.

Library code raises these; only cli.py catches them and turns them into exit codes.
"""


class HeraldError(Exception):
    """Base class for every error raised by this project."""


class InvalidIndex(HeraldError, ValueError):
    """A spin value or magnetic index is out of range or has the wrong parity."""


class HalfIntegerUnsupported(HeraldError):
    """The operation only exists for integer total spin."""


class ZeroProbabilityOutcome(HeraldError):
    """The requested outcome has (numerically) zero probability and cannot herald."""


class DomainError(HeraldError, ValueError):
    """An argument lies outside the domain of a formula."""


class GridTooCoarse(HeraldError):
    """A quadrature grid cannot resolve the narrowest component it is asked to sample."""


class QuadratureMismatch(HeraldError):
    """Two combs live in different quadratures."""


class ConfigError(HeraldError, ValueError):
    """Invalid command-line or config-file parameters."""


class ValidationFailure(HeraldError):
    """At least one validation check exceeded its tolerance."""
