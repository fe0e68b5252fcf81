"""Exception hierarchy shared by every subcenter module."""

from __future__ import annotations


class SubcenterError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SubcenterError, ValueError):
    pass


class IndexOutOfRange(SubcenterError, IndexError):
    pass


class NonPositiveWeight(SubcenterError, ValueError):
    pass


class WeightNormalization(SubcenterError, ValueError):
    pass


class RankDeficient(SubcenterError, ArithmeticError):
    """The design matrix failed the relative pivot-tolerance rank check."""

    def __init__(self, effective_rank: int, ncols: int):
        self.effective_rank = effective_rank
        self.ncols = ncols
        super().__init__(f"design has effective rank {effective_rank} < {ncols} columns")


class UnsupportedVariant(SubcenterError, ValueError):
    pass


class DegenerateGap(SubcenterError, ArithmeticError):
    pass


class InvalidSelection(SubcenterError, ValueError):
    pass


class SizeExceedsPopulation(SubcenterError, ValueError):
    pass


class SubsampleTooSmall(SubcenterError, ValueError):
    pass


class InvalidRho(SubcenterError, ValueError):
    pass


class VerificationFailure(SubcenterError, AssertionError):
    def __init__(self, name: str, residual: float, threshold: float):
        self.name = name
        self.residual = residual
        self.threshold = threshold
        super().__init__(f"{name}: residual {residual:.3e} exceeds {threshold:.1e}")


class TooManyFailures(SubcenterError, RuntimeError):
    pass
