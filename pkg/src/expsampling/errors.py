"""Exception types shared across the library."""

from __future__ import annotations


class ExpSamplingError(Exception):
    """Base class for library-specific failures."""


class ConfigurationError(ExpSamplingError, ValueError):
    """Invalid sampling configuration: bad interval, empty index set, bad grid."""


class EvaluationError(ExpSamplingError, ArithmeticError):
    """A function, sample or quadrature produced a non-finite value.

    `where` identifies the offending abscissa, sample index or cell.
    """

    def __init__(self, message: str, *, where=None):
        super().__init__(message)
        self.where = where


class DivergentMomentError(ExpSamplingError, ArithmeticError):
    """A moment scan grew without bound; carries the witness lattice point."""

    def __init__(self, message: str, *, witness_u: float, witness_k: int, order: float):
        super().__init__(message)
        self.witness_u = witness_u
        self.witness_k = witness_k
        self.order = order


class DegenerateDenominatorError(ExpSamplingError, ZeroDivisionError):
    """The max-product denominator join vanished at an evaluation point."""

    def __init__(self, message: str, *, x: float, w: float, index_set):
        super().__init__(message)
        self.x = x
        self.w = w
        self.index_set = index_set


class HypothesisNotMetError(ExpSamplingError, RuntimeError):
    """A verifier was invoked on inputs that break its kernel/function hypotheses."""


class InsufficientDataError(ExpSamplingError, ValueError):
    """Too few usable rows to fit an empirical convergence order."""


class UnsupportedOrderError(ExpSamplingError, ValueError):
    """Requested derivative order exceeds the finite-difference stencil table."""
