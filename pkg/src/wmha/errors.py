"""
Exception hierarchy for the verification engine.

Pipelines turn every WmhaError into a failing check; only InputError
(malformed files, bad flags, bad environment values) reaches the CLI.
"""

from typing import List, Optional


class WmhaError(Exception):
    """Base class for every error raised by the engine."""


# Exact linear algebra


class Infeasible(WmhaError):
    """A linear system has no solution."""


class DimensionMismatch(WmhaError):
    """Operands live in spaces of different dimension."""


class BadProjections(WmhaError):
    """The projections handed to the generalized inverse are inconsistent."""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("bad projections: " + "; ".join(self.violations))


# Algebras


class ParentMismatch(WmhaError):
    """Elements or multipliers of different algebras were combined."""


class DegenerateProduct(WmhaError):
    """The product of the algebra is degenerate."""


# Coproduct layer


class NoCounit(WmhaError):
    pass


class NonUniqueCounit(WmhaError):
    pass


class NoSuchIdempotent(WmhaError):
    """No multiplier E has the ranges of T1 and T2 as its images."""


class NotIdempotent(WmhaError):
    pass


class AmbiguousE(WmhaError):
    pass


class IllDefinedExtension(WmhaError):
    """Two preimage decompositions gave different extended coproducts."""


class NoSolution(WmhaError):
    pass


class AmbiguousSolution(WmhaError):
    pass


class CrossCheckMismatch(WmhaError):
    """Two independent construction paths disagree."""


# Antipode


class AntipodesDisagree(WmhaError):
    pass


# Groupoids


class UnknownPreset(WmhaError):
    pass


class BadParameter(WmhaError):
    pass


class WindowInvalid(WmhaError):
    pass


# Input and command line


class InputError(WmhaError, ValueError):
    """The user handed us something we cannot read."""


class ParseError(InputError):
    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ShapeError(InputError):
    pass


class ConfigError(InputError):
    pass


class VerificationFailed(WmhaError):
    pass
