"""Exception types shared across the package."""

from __future__ import annotations


class ShiftCoinError(Exception):
    """Base class for all package-specific errors."""


class NonUnitaryError(ShiftCoinError, ValueError):
    """A matrix that must be unitary is not, beyond tolerance."""


class NonIntegerFlowError(ShiftCoinError, ValueError):
    """The crossing flow at a cut did not round to an integer.

    This signals a non-unitary input or a band that wraps around the ring.
    """


class RankMismatchError(ShiftCoinError):
    """Projector ranks disagree at a cut, so no intertwiner exists.

    For a walk this means a residual net flow: normalize the index first.
    """


class SkeletonMismatchError(ShiftCoinError):
    """Factor skeletons of class members cannot be merged."""


class StageError(ShiftCoinError):
    """A compilation stage failed.  Carries the stage name for reporting."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"step '{stage}': {message}")
