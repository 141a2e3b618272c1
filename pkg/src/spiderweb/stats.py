"""Binomial proportion intervals."""

from __future__ import annotations

import math
from statistics import NormalDist


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    margin = z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    # clamp so the point estimate is always inside, even at p = 0 or 1
    return max(0.0, min(center - margin, p)), min(1.0, max(center + margin, p))
