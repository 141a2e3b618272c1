"""Exceptions shared across the package."""


class RegimeError(ValueError):
    """Parameters fall outside the regime where a formula is defined."""


class ThresholdError(RegimeError):
    """q sits exactly at the critical vacancy probability; no limit is defined there."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge."""
